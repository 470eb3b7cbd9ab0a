#include "bannerscope/language.hpp"

#include "bannerscope/tfidf.hpp"

#include <algorithm>
#include <array>

namespace bannerscope::corpus {

namespace {

constexpr double kMinScore = 0.05;

// Sorted, for binary search.
constexpr std::array<std::string_view, 52> kGerman{
    "als",   "am",     "an",    "auch",   "auf",   "aus",    "bei",   "bitte", "da",    "das",   "dass",
    "dem",   "den",    "der",   "des",    "die",   "dies",   "diese", "dieser", "durch", "ein",   "eine",
    "einen", "einer",  "es",    "für",    "haben", "hat",    "ich",   "ihr",   "ihre",  "ihren", "im",
    "ist",   "kann",   "können", "mit",   "nach",  "nicht",  "noch",  "nur",   "oder",  "sich",  "sie",
    "sind",  "um",     "und",   "unsere", "von",   "werden", "wir",   "zu"};

constexpr std::array<std::string_view, 48> kEnglish{
    "a",     "about", "all",   "an",   "and",   "are",  "as",    "at",    "be",    "by",    "can",   "do",
    "for",   "from",  "has",   "have", "how",   "if",   "is",    "it",    "its",   "may",   "more",  "not",
    "of",    "on",    "or",    "our",  "so",    "that", "the",   "their", "them",  "these", "they",  "this",
    "to",    "us",    "was",   "we",   "what",  "when", "which", "will",  "with",  "would", "you",   "your"};

template <std::size_t N>
bool listed(const std::array<std::string_view, N>& list, std::string_view token) {
    return std::binary_search(list.begin(), list.end(), token);
}

} // namespace

std::string_view to_string(PageLanguage lang) {
    switch (lang) {
    case PageLanguage::De: return "de";
    case PageLanguage::En: return "en";
    case PageLanguage::Unknown: return "unknown";
    }
    return "unknown";
}

std::optional<PageLanguage> parse_language(std::string_view name) {
    if (name == "de") return PageLanguage::De;
    if (name == "en") return PageLanguage::En;
    if (name == "unknown") return PageLanguage::Unknown;
    return std::nullopt;
}

LanguageScores language_scores(std::string_view text) {
    const auto tokens = ml::tokenize(text);
    if (tokens.empty()) return {};
    std::size_t de = 0;
    std::size_t en = 0;
    for (const auto& t : tokens) {
        if (listed(kGerman, t)) ++de;
        if (listed(kEnglish, t)) ++en;
    }
    const double n = static_cast<double>(tokens.size());
    return {static_cast<double>(de) / n, static_cast<double>(en) / n};
}

PageLanguage detect_language(std::string_view text) {
    const auto s = language_scores(text);
    if (s.de > s.en && s.de >= kMinScore) return PageLanguage::De;
    if (s.en > s.de && s.en >= kMinScore) return PageLanguage::En;
    return PageLanguage::Unknown;
}

} // namespace bannerscope::corpus
