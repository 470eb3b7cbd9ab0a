#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bannerscope::ml {

/// Lowercase word tokens; any character that is not a letter or digit separates tokens.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
public:
    Vocabulary() = default;
    /// Terms must be unique; `document_frequency` is parallel to `terms`.
    Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> document_frequency,
               std::size_t document_count);

    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }
    std::optional<std::size_t> index_of(std::string_view term) const;

    const std::vector<std::string>& terms() const noexcept { return terms_; }
    const std::vector<std::size_t>& document_frequency() const noexcept { return df_; }
    std::size_t document_count() const noexcept { return document_count_; }

    /// Smoothed inverse document frequency: ln((1 + N) / (1 + df)) + 1.
    double idf(std::size_t index) const;

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.terms_ == b.terms_ && a.df_ == b.df_ && a.document_count_ == b.document_count_;
    }

private:
    std::vector<std::string> terms_;
    std::vector<std::size_t> df_;
    std::size_t document_count_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Terms with document frequency >= min_df, indexed in first-occurrence order.
Vocabulary build_vocabulary(std::span<const std::string> texts, std::size_t min_df = 1);

/// Sparse, L2-normalized TF-IDF weights sorted by index.
struct TfIdfVector {
    std::vector<std::pair<std::uint32_t, double>> entries;

    bool empty() const noexcept { return entries.empty(); }
    double norm() const;
    double dot(std::span<const double> dense) const;
    std::vector<double> to_dense(std::size_t dimension) const;
};

/// Raw-count tf times smoothed idf, then L2 normalization. Out-of-vocabulary
/// tokens are ignored; an all-OOV text gives the empty vector.
TfIdfVector vectorize(std::string_view text, const Vocabulary& vocab);

} // namespace bannerscope::ml
