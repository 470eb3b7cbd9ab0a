#pragma once

// A deliberately small CSS engine: type/id/class selectors joined by the
// descendant combinator, a fixed property subset, and a cascade ranked by
// (inline, specificity, source order). No pseudo-classes, media queries or
// !important.

#include "bannerscope/color.hpp"
#include "bannerscope/dom.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bannerscope::css {

struct CompoundSelector {
    std::optional<std::string> tag; // nullopt for '*' or when omitted
    std::optional<std::string> id;
    std::vector<std::string> classes;
};

/// Compounds from left to right, each a descendant of the previous one.
struct Selector {
    std::vector<CompoundSelector> chain;
};

struct Specificity {
    int ids = 0;
    int classes = 0;
    int tags = 0;

    friend constexpr auto operator<=>(const Specificity&, const Specificity&) = default;
};

struct Declaration {
    std::string property; // lowercase
    std::string value;    // trimmed, !important stripped

    friend bool operator==(const Declaration&, const Declaration&) = default;
};

struct StyleRule {
    Selector selector;
    std::vector<Declaration> declarations;
    Specificity specificity;
    std::uint64_t source_order = 0;
};

/// nullopt for unsupported syntax (attribute selectors, pseudo-classes,
/// child/sibling combinators, escapes).
std::optional<Selector> parse_selector(std::string_view text);
Specificity specificity_of(const Selector& selector);
bool matches(const dom::DomTree& tree, dom::NodeId element, const Selector& selector);

/// Parses a declaration block body, keeping only supported properties.
std::vector<Declaration> parse_declarations(std::string_view block);

/// One rule per supported selector in each selector list, numbered from
/// `starting_order`. Never throws; unsupported input is skipped.
std::vector<StyleRule> parse_stylesheet(std::string_view text, std::uint64_t starting_order = 0);

/// Rules from <style> elements and linked sheets, in document order.
/// `linked_sheets[i]` is the text of the i-th <link rel=stylesheet>; a
/// nullopt entry marks a sheet that could not be fetched.
std::vector<StyleRule> collect_document_rules(const dom::DomTree& tree,
                                              std::span<const std::optional<std::string>> linked_sheets = {});

/// Elements of the form <link rel="stylesheet" href=...> in document order.
std::vector<dom::NodeId> stylesheet_links(const dom::DomTree& tree);

enum class Position : std::uint8_t { Static, Relative, Absolute, Fixed, Sticky };
enum class Display : std::uint8_t { Other, None };

struct ComputedStyle {
    ColorRgba color = ColorRgba::black();
    ColorRgba background_color = ColorRgba::transparent();
    double font_size = 16.0; // px
    int font_weight = 400;
    Position position = Position::Static;
    std::optional<int> z_index;
    Display display = Display::Other;
    bool border_present = false;

    friend bool operator==(const ComputedStyle&, const ComputedStyle&) = default;
};

std::string_view to_string(Position p);

/// Computed styles for every element of one document.
class StyleMap {
public:
    StyleMap(const dom::DomTree& tree, std::span<const StyleRule> rules);

    /// Style of an element; for other nodes, the style of the nearest element ancestor
    /// (the document node gets the defaults).
    const ComputedStyle& at(dom::NodeId node) const;

    /// display:none on the node or any ancestor.
    bool hidden(dom::NodeId node) const;

private:
    std::vector<ComputedStyle> styles_;
    std::vector<bool> hidden_;
};

/// Computed style of a single element. Throws PreconditionError for non-elements.
ComputedStyle computed_style(const dom::DomTree& tree, dom::NodeId node, std::span<const StyleRule> rules);

} // namespace bannerscope::css
