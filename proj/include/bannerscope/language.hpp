#pragma once

#include <optional>
#include <string_view>

namespace bannerscope::corpus {

enum class PageLanguage : std::uint8_t { De, En, Unknown };

std::string_view to_string(PageLanguage lang);
std::optional<PageLanguage> parse_language(std::string_view name);

struct LanguageScores {
    double de = 0.0; // fraction of tokens on the German stopword list
    double en = 0.0;
};

LanguageScores language_scores(std::string_view text);

/// The higher-scoring language if its stopword fraction is at least 0.05;
/// unknown otherwise, including exact ties.
PageLanguage detect_language(std::string_view text);

} // namespace bannerscope::corpus
