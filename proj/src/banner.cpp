#include "bannerscope/banner.hpp"

#include "bannerscope/clickables.hpp"
#include "bannerscope/text_util.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace bannerscope::banner {

namespace {

using dom::DomTree;
using dom::NodeId;

bool inside_raw_text(const DomTree& tree, NodeId text_node) {
    const auto& parent = tree[text_node].parent;
    return parent && tree[*parent].is_element() && dom::is_raw_text_element(tree[*parent].tag);
}

bool inside_clickable(const DomTree& tree, NodeId node) {
    for (auto cur = tree[node].parent; cur; cur = tree[*cur].parent) {
        if (clickables::clickable_source(tree[*cur])) return true;
    }
    return false;
}

bool is_structural(const DomTree& tree, NodeId id) {
    return id == tree.root() || id == tree.html() || id == tree.body() || id == tree.head();
}

std::vector<std::string> attribute_tokens(const dom::DomNode& n) {
    std::vector<std::string> tokens;
    if (const auto* id = n.attribute("id")) {
        const std::string t = text::to_lower(text::collapse_whitespace(*id));
        if (!t.empty()) tokens.push_back(t);
    }
    if (const auto* cls = n.attribute("class")) {
        const std::string lowered = text::to_lower(*cls);
        std::size_t i = 0;
        while (i < lowered.size()) {
            while (i < lowered.size() && std::isspace(static_cast<unsigned char>(lowered[i]))) ++i;
            const std::size_t start = i;
            while (i < lowered.size() && !std::isspace(static_cast<unsigned char>(lowered[i]))) ++i;
            if (i > start) tokens.push_back(lowered.substr(start, i - start));
        }
    }
    return tokens;
}

} // namespace

std::vector<KeywordHit> find_keyword_hits(const DomTree& tree, const KeywordLexicon& lexicon) {
    std::vector<KeywordHit> hits;
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
        const NodeId id{i};
        const auto& n = tree[id];
        if (!n.is_text() || inside_raw_text(tree, id)) continue;
        const std::string normalized = text::to_lower(text::collapse_whitespace(n.text));
        if (normalized.empty()) continue;
        std::set<std::string_view> seen;
        for (Language lang : {Language::De, Language::En}) {
            for (const auto& kw : lexicon.keywords(lang)) {
                if (seen.contains(kw) || normalized.find(kw) == std::string::npos) continue;
                seen.insert(kw);
                hits.push_back({id, kw, lang});
            }
        }
    }
    return hits;
}

double score_candidate(const BannerCandidate& c, const ScoringWeights& w) {
    return w.per_keyword * c.distinct_keywords +
           w.per_clickable * std::min(c.clickable_count, w.clickable_cap) + c.positioning_bonus +
           c.attribute_bonus - c.size_penalty;
}

int positioning_bonus(const css::ComputedStyle& style, const ScoringWeights& w) {
    int bonus = 0;
    if (style.position == css::Position::Fixed || style.position == css::Position::Sticky ||
        style.position == css::Position::Absolute) {
        bonus += w.positioned_bonus;
    }
    if (style.z_index && *style.z_index > w.z_index_threshold) bonus += w.z_index_bonus;
    return bonus;
}

bool has_attribute_hint(const dom::DomNode& element, const KeywordLexicon& lexicon) {
    for (const auto& token : attribute_tokens(element)) {
        for (const auto& hint : lexicon.attribute_hints) {
            if (token.find(hint) != std::string::npos) return true;
        }
    }
    return false;
}

std::vector<BannerCandidate> generate_candidates(const DomTree& tree, const std::vector<KeywordHit>& hits,
                                                 const css::StyleMap& styles, const KeywordLexicon& lexicon,
                                                 const CandidateOptions& options) {
    std::map<NodeId, std::optional<BannerCandidate>> evaluated;

    auto evaluate = [&](NodeId root) -> std::optional<BannerCandidate> {
        BannerCandidate c;
        c.root = root;
        c.text_length = text::length(dom::subtree_text(tree, root));
        if (c.text_length < options.min_text_length || c.text_length > options.max_text_length) return std::nullopt;
        c.clickable_count = static_cast<int>(clickables::extract_clickables(tree, root, styles).size());
        if (c.clickable_count == 0) return std::nullopt;
        std::set<std::string_view> keywords;
        for (const auto& h : hits) {
            if (tree.is_ancestor_or_self(root, h.node)) keywords.insert(h.keyword);
        }
        c.distinct_keywords = static_cast<int>(keywords.size());
        const auto& w = options.weights;
        c.positioning_bonus = positioning_bonus(styles.at(root), w);
        c.attribute_bonus = has_attribute_hint(tree[root], lexicon) ? w.attribute_bonus : 0;
        c.size_penalty = c.text_length > w.size_penalty_above ? w.size_penalty : 0;
        c.score = score_candidate(c, w);
        return c;
    };

    for (const auto& hit : hits) {
        if (!options.seed_from_clickable_text && inside_clickable(tree, hit.node)) continue;
        auto cur = tree[hit.node].parent;
        for (int step = 0; step < options.max_ascent && cur && !is_structural(tree, *cur); ++step) {
            if (!evaluated.contains(*cur)) evaluated.emplace(*cur, evaluate(*cur));
            cur = tree[*cur].parent;
        }
    }

    std::vector<BannerCandidate> out;
    for (auto& [root, candidate] : evaluated) {
        if (candidate) out.push_back(std::move(*candidate));
    }
    return out;
}

std::optional<BannerCandidate> select_banner(const std::vector<BannerCandidate>& candidates) {
    if (candidates.empty()) return std::nullopt;
    const auto better = [](const BannerCandidate& a, const BannerCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.text_length != b.text_length) return a.text_length < b.text_length;
        return a.root < b.root;
    };
    return *std::min_element(candidates.begin(), candidates.end(),
                             [&](const BannerCandidate& a, const BannerCandidate& b) { return better(a, b); });
}

} // namespace bannerscope::banner
