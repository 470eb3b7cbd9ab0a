#pragma once

// Cookie-banner localisation: keyword hits in text nodes, ascent to
// enclosing containers, heuristic scoring and selection.

#include "bannerscope/css.hpp"
#include "bannerscope/dom.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bannerscope::banner {

enum class Language : std::uint8_t { De, En };

std::string_view to_string(Language lang);

struct KeywordLexicon {
    std::vector<std::string> de;
    std::vector<std::string> en;
    std::vector<std::string> attribute_hints;

    const std::vector<std::string>& keywords(Language lang) const { return lang == Language::De ? de : en; }
};

/// Parses the line-oriented lexicon format. Throws FormatError.
KeywordLexicon parse_lexicon(std::string_view text);
/// Throws IoError or FormatError.
KeywordLexicon load_lexicon(const std::filesystem::path& path);
/// The compiled-in copy of data/lexicon.txt.
const KeywordLexicon& default_lexicon();

struct KeywordHit {
    dom::NodeId node; // text node
    std::string keyword;
    Language language = Language::De;
};

/// One hit per (text node, keyword); the language is the first one (de, en)
/// listing the keyword.
std::vector<KeywordHit> find_keyword_hits(const dom::DomTree& tree, const KeywordLexicon& lexicon);

struct ScoringWeights {
    double per_keyword = 3.0;
    double per_clickable = 2.0;
    int clickable_cap = 3;
    int positioned_bonus = 4;
    int z_index_bonus = 2;
    int z_index_threshold = 10;
    int attribute_bonus = 3;
    int size_penalty = 2;
    std::size_t size_penalty_above = 1500;
};

struct CandidateOptions {
    int max_ascent = 8;
    std::size_t min_text_length = 25;
    std::size_t max_text_length = 4000;
    /// When false, hits whose text lies inside a clickable element (typically
    /// a "Datenschutz" footer link) do not start an ascent. They still count
    /// towards distinct_keywords of candidates seeded by other hits.
    bool seed_from_clickable_text = false;
    ScoringWeights weights;
};

struct BannerCandidate {
    dom::NodeId root;
    int distinct_keywords = 0;
    std::size_t text_length = 0; // code points of subtree_text(root)
    int clickable_count = 0;
    int positioning_bonus = 0;
    int attribute_bonus = 0;
    int size_penalty = 0;
    double score = 0.0;
};

double score_candidate(const BannerCandidate& c, const ScoringWeights& weights = {});

/// Positioning, attribute and size components for a candidate root.
int positioning_bonus(const css::ComputedStyle& style, const ScoringWeights& weights = {});
bool has_attribute_hint(const dom::DomNode& element, const KeywordLexicon& lexicon);

std::vector<BannerCandidate> generate_candidates(const dom::DomTree& tree, const std::vector<KeywordHit>& hits,
                                                 const css::StyleMap& styles, const KeywordLexicon& lexicon,
                                                 const CandidateOptions& options = {});

/// Highest score; ties go to the shorter text, then to the smaller node id.
std::optional<BannerCandidate> select_banner(const std::vector<BannerCandidate>& candidates);

} // namespace bannerscope::banner
