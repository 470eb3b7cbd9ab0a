#pragma once

// Button classes, label records, the shipped seed-phrase table and the
// append-only JSON-lines label store.

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bannerscope::ml {

/// Declaration order is the tiebreak order.
enum class ButtonClass : std::uint8_t { Accept = 0, Reject = 1, Settings = 2, Other = 3 };

inline constexpr std::size_t kClassCount = 4;
inline constexpr std::array<ButtonClass, kClassCount> kAllClasses{ButtonClass::Accept, ButtonClass::Reject,
                                                                  ButtonClass::Settings, ButtonClass::Other};

std::string_view to_string(ButtonClass c);
std::optional<ButtonClass> parse_button_class(std::string_view name);

enum class LabelSource : std::uint8_t { Seed, Manual, Active };

std::string_view to_string(LabelSource s);
std::optional<LabelSource> parse_label_source(std::string_view name);

struct LabelRecord {
    std::string text; // normalized label
    ButtonClass label = ButtonClass::Other;
    LabelSource source = LabelSource::Manual;

    friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

struct SeedPhrase {
    std::string phrase;
    std::vector<std::string> tokens;
    ButtonClass label = ButtonClass::Other;
};

/// `<class>:<phrase>` lines with '#' comments. Throws FormatError.
std::vector<SeedPhrase> parse_seed_table(std::string_view text);
const std::vector<SeedPhrase>& default_seed_table();

/// Labels texts whose tokens contain a seed phrase's tokens contiguously;
/// the longest matching phrase wins. Unmatched texts get no record.
std::vector<LabelRecord> seed_labels(const std::vector<std::string>& texts,
                                     const std::vector<SeedPhrase>& table = default_seed_table());

/// Every seed phrase as a training record.
std::vector<LabelRecord> seed_records(const std::vector<SeedPhrase>& table = default_seed_table());

/// One record per text: active beats manual beats seed, later beats earlier.
std::vector<LabelRecord> merge_training_records(const std::vector<LabelRecord>& records);

/// Append-only JSON-lines file of LabelRecords. Not thread-safe; callers
/// serialize writers.
class LabelStore {
public:
    /// Loads existing records; a missing file is an empty store. Throws
    /// IoError or FormatError.
    explicit LabelStore(std::filesystem::path path);

    const std::filesystem::path& path() const noexcept { return path_; }

    /// Records deduplicated by (text, source), later lines winning.
    std::vector<LabelRecord> records() const;
    /// Number of lines in the file.
    std::size_t line_count() const noexcept { return lines_.size(); }
    bool contains_text(std::string_view text) const;
    std::set<std::string> labeled_texts() const;

    /// Normalizes the text, appends one line and flushes it to disk.
    const LabelRecord& append(LabelRecord record);

private:
    std::filesystem::path path_;
    std::vector<LabelRecord> lines_;
};

std::string to_json_line(const LabelRecord& r);
/// Throws FormatError (line 0) for malformed input.
LabelRecord parse_json_line(std::string_view line);

} // namespace bannerscope::ml
