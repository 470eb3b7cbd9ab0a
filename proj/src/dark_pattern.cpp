#include "bannerscope/dark_pattern.hpp"

#include "bannerscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bannerscope::dark {

namespace {

std::string format(const char* fmt, double a, double b, double c, double d) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
    return buf;
}

} // namespace

std::optional<std::size_t> best_of_class(const std::vector<ml::Prediction>& predictions, ml::ButtonClass cls) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i].label != cls) continue;
        if (!best || predictions[i].margin > predictions[*best].margin) best = i;
    }
    return best;
}

std::optional<ButtonPair> pair_buttons(const std::vector<clickables::ClickableElement>& clickables,
                                       const std::vector<ml::Prediction>& predictions) {
    if (clickables.size() != predictions.size()) {
        throw PreconditionError("pair_buttons: predictions must cover all clickables");
    }
    const auto accept = best_of_class(predictions, ml::ButtonClass::Accept);
    const auto reject = best_of_class(predictions, ml::ButtonClass::Reject);
    if (!accept || !reject) return std::nullopt;
    return ButtonPair{*accept, *reject};
}

css::ColorRgba banner_background(const dom::DomTree& tree, dom::NodeId banner_root, const css::StyleMap& styles) {
    std::optional<dom::NodeId> cur = banner_root;
    while (cur) {
        const auto& bg = styles.at(*cur).background_color;
        if (bg.a >= kOpaqueAlpha) return bg;
        cur = tree[*cur].parent;
    }
    return css::ColorRgba::white();
}

StyleProfile visual_profile(const dom::DomTree& tree, dom::NodeId node, const css::StyleMap& styles,
                            dom::NodeId banner_root, const css::ColorRgba& banner_bg) {
    if (!tree.is_ancestor_or_self(banner_root, node)) {
        throw PreconditionError("visual_profile: node lies outside the banner subtree");
    }
    const auto& style = styles.at(node);
    StyleProfile p;
    p.node = node;
    p.text_color = style.color;
    p.font_size = style.font_size;
    p.font_weight = style.font_weight;
    p.border_present = style.border_present;

    std::optional<css::ColorRgba> found;
    for (std::optional<dom::NodeId> cur = node; cur; cur = tree[*cur].parent) {
        const auto& bg = styles.at(*cur).background_color;
        if (bg.a >= kOpaqueAlpha) {
            found = bg;
            break;
        }
        if (*cur == banner_root) break;
    }
    if (!found) found = banner_bg.a >= kOpaqueAlpha ? banner_bg : css::ColorRgba::white();
    p.effective_background = *found;
    p.prominence = css::contrast_ratio(p.effective_background, banner_bg.a >= kOpaqueAlpha ? banner_bg
                                                                                           : css::ColorRgba::white());
    return p;
}

DissimilarityScore dissimilarity(const StyleProfile& accept, const StyleProfile& reject,
                                 const DissimilarityWeights& weights) {
    DissimilarityScore s;
    s.bg_delta_e = css::delta_e(accept.effective_background, reject.effective_background);
    s.text_delta_e = css::delta_e(accept.text_color, reject.text_color);
    s.prominence_gap = std::max(0.0, accept.prominence - reject.prominence);
    const double fa = std::max(accept.font_size, 1e-6);
    const double fr = std::max(reject.font_size, 1e-6);
    s.size_component = std::abs(std::log(fa / fr)) +
                       (accept.border_present != reject.border_present ? weights.border_mismatch : 0.0);
    const double raw = weights.background * s.bg_delta_e + weights.text * s.text_delta_e +
                       weights.prominence * s.prominence_gap + weights.size * s.size_component;
    s.total = std::clamp(raw, 0.0, 100.0);
    return s;
}

std::string_view to_string(FindingKind k) {
    return k == FindingKind::AestheticManipulation ? "aesthetic_manipulation" : "missing_reject_first_layer";
}

std::string_view to_string(Severity s) { return s == Severity::Warning ? "warning" : "notice"; }

std::vector<Finding> detect_findings(const dom::DomTree& tree, dom::NodeId banner_root,
                                     const std::vector<clickables::ClickableElement>& clickables,
                                     const std::vector<ml::Prediction>& predictions, const css::StyleMap& styles,
                                     double threshold, const DissimilarityWeights& weights) {
    if (!(threshold >= 0.0 && threshold <= 100.0)) throw PreconditionError("threshold must lie in [0, 100]");
    std::vector<Finding> findings;
    const auto accept = best_of_class(predictions, ml::ButtonClass::Accept);
    if (!accept) return findings;
    if (clickables.size() != predictions.size()) {
        throw PreconditionError("detect_findings: predictions must cover all clickables");
    }
    const dom::NodeId accept_node = clickables[*accept].node;

    if (const auto pair = pair_buttons(clickables, predictions)) {
        const dom::NodeId reject_node = clickables[pair->reject].node;
        const auto banner_bg = banner_background(tree, banner_root, styles);
        const auto pa = visual_profile(tree, accept_node, styles, banner_root, banner_bg);
        const auto pr = visual_profile(tree, reject_node, styles, banner_root, banner_bg);
        const auto score = dissimilarity(pa, pr, weights);
        if (score.total > 0.0 && score.total >= threshold) {
            Finding f;
            f.kind = FindingKind::AestheticManipulation;
            f.severity = score.prominence_gap > 0.0 ? Severity::Warning : Severity::Notice;
            f.accept_node = accept_node;
            f.reject_node = reject_node;
            f.lca = dom::lowest_common_ancestor(tree, accept_node, reject_node);
            f.score = score;
            f.explanation =
                f.severity == Severity::Warning
                    ? format("accept and reject are styled differently (score %.2f, threshold %.2f); accept stands "
                             "out more against the banner (accept contrast %.2f, reject %.2f)",
                             score.total, threshold, pa.prominence, pr.prominence)
                    : format("accept and reject are styled differently (score %.2f, threshold %.2f) but reject is at "
                             "least as prominent (reject contrast %.2f, accept %.2f)",
                             score.total, threshold, pr.prominence, pa.prominence);
            findings.push_back(std::move(f));
        }
        return findings;
    }

    Finding f;
    f.kind = FindingKind::MissingRejectFirstLayer;
    f.severity = Severity::Warning;
    f.accept_node = accept_node;
    f.explanation = "the banner offers an accept button but no reject button on its first layer";
    findings.push_back(std::move(f));
    return findings;
}

} // namespace bannerscope::dark
