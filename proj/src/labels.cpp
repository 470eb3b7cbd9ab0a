#include "bannerscope/labels.hpp"

#include "bannerscope/clickables.hpp"
#include "bannerscope/error.hpp"
#include "bannerscope/shipped_data.hpp"
#include "bannerscope/text_util.hpp"
#include "bannerscope/tfidf.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace bannerscope::ml {

namespace {

constexpr std::array<std::string_view, kClassCount> kClassNames{"accept", "reject", "settings", "other"};

bool contains_run(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

int source_rank(LabelSource s) {
    switch (s) {
    case LabelSource::Seed: return 0;
    case LabelSource::Manual: return 1;
    case LabelSource::Active: return 2;
    }
    return 0;
}

} // namespace

std::string_view to_string(ButtonClass c) { return kClassNames[static_cast<std::size_t>(c)]; }

std::optional<ButtonClass> parse_button_class(std::string_view name) {
    const std::string lower = text::to_lower(text::collapse_whitespace(name));
    for (std::size_t i = 0; i < kClassCount; ++i) {
        if (lower == kClassNames[i]) return kAllClasses[i];
    }
    return std::nullopt;
}

std::string_view to_string(LabelSource s) {
    switch (s) {
    case LabelSource::Seed: return "seed";
    case LabelSource::Manual: return "manual";
    case LabelSource::Active: return "active";
    }
    return "manual";
}

std::optional<LabelSource> parse_label_source(std::string_view name) {
    if (name == "seed") return LabelSource::Seed;
    if (name == "manual") return LabelSource::Manual;
    if (name == "active") return LabelSource::Active;
    return std::nullopt;
}

std::vector<SeedPhrase> parse_seed_table(std::string_view text) {
    std::vector<SeedPhrase> table;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = text::collapse_whitespace(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const auto colon = trimmed.find(':');
        if (colon == std::string::npos) throw FormatError(line_no, "expected '<class>:<phrase>'");
        const auto cls = parse_button_class(trimmed.substr(0, colon));
        if (!cls) throw FormatError(line_no, "unknown class '" + trimmed.substr(0, colon) + "'");
        SeedPhrase p;
        p.phrase = clickables::normalize_label(trimmed.substr(colon + 1));
        p.tokens = tokenize(p.phrase);
        p.label = *cls;
        if (p.tokens.empty()) throw FormatError(line_no, "phrase has no word tokens");
        table.push_back(std::move(p));
    }
    return table;
}

const std::vector<SeedPhrase>& default_seed_table() {
    static const std::vector<SeedPhrase> table = parse_seed_table(shipped::seed_phrases_text());
    return table;
}

std::vector<LabelRecord> seed_labels(const std::vector<std::string>& texts, const std::vector<SeedPhrase>& table) {
    std::vector<LabelRecord> out;
    for (const auto& raw : texts) {
        const std::string text = clickables::normalize_label(raw);
        const auto tokens = tokenize(text);
        const SeedPhrase* best = nullptr;
        for (const auto& p : table) {
            if (!contains_run(tokens, p.tokens)) continue;
            // Longest phrase wins: more tokens, then more bytes, then class order.
            if (!best || p.tokens.size() > best->tokens.size() ||
                (p.tokens.size() == best->tokens.size() &&
                 (p.phrase.size() > best->phrase.size() ||
                  (p.phrase.size() == best->phrase.size() && p.label < best->label)))) {
                best = &p;
            }
        }
        if (best) out.push_back({text, best->label, LabelSource::Seed});
    }
    return out;
}

std::vector<LabelRecord> seed_records(const std::vector<SeedPhrase>& table) {
    std::vector<LabelRecord> out;
    out.reserve(table.size());
    for (const auto& p : table) out.push_back({p.phrase, p.label, LabelSource::Seed});
    return merge_training_records(out);
}

std::vector<LabelRecord> merge_training_records(const std::vector<LabelRecord>& records) {
    std::vector<std::string> order;
    std::map<std::string, LabelRecord> chosen;
    for (const auto& r : records) {
        auto it = chosen.find(r.text);
        if (it == chosen.end()) {
            order.push_back(r.text);
            chosen.emplace(r.text, r);
        } else if (source_rank(r.source) >= source_rank(it->second.source)) {
            it->second = r;
        }
    }
    std::vector<LabelRecord> out;
    out.reserve(order.size());
    for (const auto& t : order) out.push_back(chosen.at(t));
    return out;
}

std::string to_json_line(const LabelRecord& r) {
    nlohmann::ordered_json j;
    j["text"] = r.text;
    j["label"] = to_string(r.label);
    j["source"] = to_string(r.source);
    return j.dump();
}

LabelRecord parse_json_line(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(0, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string() || !j.contains("label") ||
        !j["label"].is_string()) {
        throw FormatError(0, "record needs string fields 'text' and 'label'");
    }
    LabelRecord r;
    r.text = clickables::normalize_label(j["text"].get<std::string>());
    const auto cls = parse_button_class(j["label"].get<std::string>());
    if (!cls) throw FormatError(0, "unknown label '" + j["label"].get<std::string>() + "'");
    r.label = *cls;
    r.source = LabelSource::Manual;
    if (j.contains("source")) {
        if (!j["source"].is_string()) throw FormatError(0, "'source' must be a string");
        const auto src = parse_label_source(j["source"].get<std::string>());
        if (!src) throw FormatError(0, "unknown source '" + j["source"].get<std::string>() + "'");
        r.source = *src;
    }
    if (r.text.empty()) throw FormatError(0, "empty text");
    return r;
}

LabelStore::LabelStore(std::filesystem::path path) : path_(std::move(path)) {
    std::error_code ec;
    if (!std::filesystem::exists(path_, ec)) return;
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw IoError("cannot open label store " + path_.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::collapse_whitespace(line).empty()) continue;
        try {
            lines_.push_back(parse_json_line(line));
        } catch (const FormatError& e) {
            throw FormatError(line_no, path_.string() + ": " + e.what());
        }
    }
    if (in.bad()) throw IoError("cannot read label store " + path_.string());
}

std::vector<LabelRecord> LabelStore::records() const {
    std::vector<LabelRecord> out;
    std::map<std::pair<std::string, LabelSource>, std::size_t> slot;
    for (const auto& r : lines_) {
        const auto key = std::make_pair(r.text, r.source);
        if (auto it = slot.find(key); it != slot.end()) {
            out[it->second] = r;
        } else {
            slot.emplace(key, out.size());
            out.push_back(r);
        }
    }
    return out;
}

bool LabelStore::contains_text(std::string_view text) const {
    const std::string norm = clickables::normalize_label(text);
    return std::any_of(lines_.begin(), lines_.end(), [&](const LabelRecord& r) { return r.text == norm; });
}

std::set<std::string> LabelStore::labeled_texts() const {
    std::set<std::string> out;
    for (const auto& r : lines_) out.insert(r.text);
    return out;
}

const LabelRecord& LabelStore::append(LabelRecord record) {
    record.text = clickables::normalize_label(record.text);
    if (record.text.empty()) throw PreconditionError("label text is empty after normalization");
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open label store " + path_.string() + " for appending");
    out << to_json_line(record) << '\n';
    out.flush();
    if (!out) throw IoError("cannot write label store " + path_.string());
    lines_.push_back(std::move(record));
    return lines_.back();
}

} // namespace bannerscope::ml
