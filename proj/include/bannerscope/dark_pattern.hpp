#pragma once

// Accept/reject pairing, visual profiles, the dissimilarity score and the
// two finding kinds.

#include "bannerscope/clickables.hpp"
#include "bannerscope/color.hpp"
#include "bannerscope/css.hpp"
#include "bannerscope/dom.hpp"
#include "bannerscope/svm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bannerscope::dark {

/// Backgrounds with lower alpha count as transparent.
inline constexpr double kOpaqueAlpha = 0.1;

struct ButtonPair {
    std::size_t accept = 0; // indices into the clickable list
    std::size_t reject = 0;
};

/// Highest-margin Accept and highest-margin Reject (first in document order
/// on equal margins). Throws PreconditionError if the lists differ in size.
std::optional<ButtonPair> pair_buttons(const std::vector<clickables::ClickableElement>& clickables,
                                       const std::vector<ml::Prediction>& predictions);

/// Index of the highest-margin clickable predicted as `cls`.
std::optional<std::size_t> best_of_class(const std::vector<ml::Prediction>& predictions, ml::ButtonClass cls);

/// Own background of the banner root, else the nearest ancestor's, else white.
css::ColorRgba banner_background(const dom::DomTree& tree, dom::NodeId banner_root, const css::StyleMap& styles);

struct StyleProfile {
    dom::NodeId node;
    css::ColorRgba effective_background;
    css::ColorRgba text_color;
    double font_size = 16.0;
    int font_weight = 400;
    bool border_present = false;
    double prominence = 1.0; // contrast of effective_background against the banner background
};

/// The effective background is searched from `node` up to and including
/// `banner_root`, then falls back to `banner_bg`, then white.
StyleProfile visual_profile(const dom::DomTree& tree, dom::NodeId node, const css::StyleMap& styles,
                            dom::NodeId banner_root, const css::ColorRgba& banner_bg);

struct DissimilarityWeights {
    double background = 0.5;
    double text = 0.2;
    double prominence = 3.0;
    double size = 10.0;
    double border_mismatch = 0.5; // added to the size component
};

struct DissimilarityScore {
    double bg_delta_e = 0.0;
    double text_delta_e = 0.0;
    double prominence_gap = 0.0;
    double size_component = 0.0;
    double total = 0.0; // clamped to [0, 100]
};

DissimilarityScore dissimilarity(const StyleProfile& accept, const StyleProfile& reject,
                                 const DissimilarityWeights& weights = {});

enum class FindingKind : std::uint8_t { AestheticManipulation, MissingRejectFirstLayer };
enum class Severity : std::uint8_t { Notice, Warning };

std::string_view to_string(FindingKind k);
std::string_view to_string(Severity s);

struct Finding {
    FindingKind kind = FindingKind::AestheticManipulation;
    Severity severity = Severity::Warning;
    dom::NodeId accept_node;
    std::optional<dom::NodeId> reject_node;
    std::optional<dom::NodeId> lca;
    std::optional<DissimilarityScore> score;
    std::string explanation;
};

inline constexpr double kDefaultThreshold = 20.0;

/// Aesthetic manipulation when the pair's total is >= threshold (and > 0):
/// a warning if accept is the more prominent one, a notice otherwise. With
/// an Accept but no Reject, a missing-reject warning. Throws
/// PreconditionError unless threshold is in [0, 100].
std::vector<Finding> detect_findings(const dom::DomTree& tree, dom::NodeId banner_root,
                                     const std::vector<clickables::ClickableElement>& clickables,
                                     const std::vector<ml::Prediction>& predictions, const css::StyleMap& styles,
                                     double threshold = kDefaultThreshold, const DissimilarityWeights& weights = {});

} // namespace bannerscope::dark
