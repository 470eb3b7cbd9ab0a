#pragma once

#include "bannerscope/css.hpp"
#include "bannerscope/dom.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace bannerscope::clickables {

enum class DetectionSource : std::uint8_t { Tag, RoleAttr, OnclickAttr };

std::string_view to_string(DetectionSource source);

struct ClickableElement {
    dom::NodeId node;
    std::string tag;
    std::string label;
    DetectionSource detection_source = DetectionSource::Tag;
};

/// How `element` qualifies as clickable, if it does at all.
std::optional<DetectionSource> clickable_source(const dom::DomNode& element);

/// Lowercased, whitespace-collapsed, edge punctuation stripped, at most 80
/// code points.
std::string normalize_label(std::string_view raw);

/// Innermost visible clickables below (or at) `root`, in document order.
/// Elements whose label normalizes to "" are dropped.
std::vector<ClickableElement> extract_clickables(const dom::DomTree& tree, dom::NodeId root,
                                                 const css::StyleMap& styles);

} // namespace bannerscope::clickables
