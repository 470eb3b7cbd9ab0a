#include "bannerscope/css.hpp"

#include "bannerscope/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

namespace bannerscope::css {

namespace {

using dom::DomTree;
using dom::NodeId;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}

std::string strip_comments(std::string_view css) {
    std::string out;
    out.reserve(css.size());
    std::size_t i = 0;
    while (i < css.size()) {
        if (css[i] == '/' && i + 1 < css.size() && css[i + 1] == '*') {
            const std::size_t end = css.find("*/", i + 2);
            if (end == std::string_view::npos) break;
            i = end + 2;
            out.push_back(' ');
            continue;
        }
        if (css[i] == '"' || css[i] == '\'') {
            const char q = css[i];
            std::size_t j = i + 1;
            while (j < css.size() && css[j] != q) j += (css[j] == '\\') ? 2 : 1;
            j = std::min(j + 1, css.size());
            out.append(css.substr(i, j - i));
            i = j;
            continue;
        }
        out.push_back(css[i++]);
    }
    return out;
}

/// Splits on `sep` at nesting depth zero, outside strings.
std::vector<std::string_view> split_top_level(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    int depth = 0;
    char quote = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (quote) {
            if (c == '\\') ++i;
            else if (c == quote) quote = 0;
            continue;
        }
        if (c == '"' || c == '\'') quote = c;
        else if (c == '(' || c == '[') ++depth;
        else if ((c == ')' || c == ']') && depth > 0) --depth;
        else if (c == sep && depth == 0) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.push_back(s.substr(start));
    return parts;
}

/// Index just past the block that opens at s[open] == '{'.
std::size_t skip_block(std::string_view s, std::size_t open) {
    int depth = 0;
    char quote = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char c = s[i];
        if (quote) {
            if (c == '\\') ++i;
            else if (c == quote) quote = 0;
            continue;
        }
        if (c == '"' || c == '\'') quote = c;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i + 1;
    }
    return s.size();
}

bool is_supported_property(std::string_view p) {
    return p == "color" || p == "background-color" || p == "background" || p == "font-size" ||
           p == "font-weight" || p == "position" || p == "z-index" || p == "display" || p == "border";
}

std::optional<CompoundSelector> parse_compound(std::string_view s) {
    CompoundSelector c;
    std::size_t i = 0;
    if (i < s.size() && s[i] == '*') {
        ++i;
    } else if (i < s.size() && is_ident_char(s[i])) {
        const std::size_t start = i;
        while (i < s.size() && is_ident_char(s[i])) ++i;
        c.tag = lower(s.substr(start, i - start));
    }
    while (i < s.size()) {
        const char kind = s[i];
        if (kind != '#' && kind != '.') return std::nullopt;
        const std::size_t start = ++i;
        while (i < s.size() && is_ident_char(s[i])) ++i;
        if (i == start) return std::nullopt;
        std::string name(s.substr(start, i - start));
        if (kind == '#') {
            if (c.id && *c.id != name) return std::nullopt;
            c.id = std::move(name);
        } else {
            c.classes.push_back(std::move(name));
        }
    }
    if (s.empty()) return std::nullopt;
    return c;
}

bool matches_compound(const dom::DomNode& n, const CompoundSelector& c) {
    if (!n.is_element()) return false;
    if (c.tag && n.tag != *c.tag) return false;
    if (c.id) {
        const auto* id = n.attribute("id");
        if (!id || *id != *c.id) return false;
    }
    if (!c.classes.empty()) {
        const auto* cls = n.attribute("class");
        if (!cls) return false;
        for (const auto& wanted : c.classes) {
            bool found = false;
            std::size_t i = 0;
            const std::string_view v = *cls;
            while (i < v.size() && !found) {
                while (i < v.size() && is_space(v[i])) ++i;
                const std::size_t start = i;
                while (i < v.size() && !is_space(v[i])) ++i;
                found = v.substr(start, i - start) == wanted;
            }
            if (!found) return false;
        }
    }
    return true;
}

std::optional<double> parse_number(std::string_view s) {
    double value = 0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<double> parse_font_size(std::string_view raw, double parent) {
    const std::string v = lower(trim(raw));
    static const std::unordered_map<std::string, double> kKeywords{
        {"xx-small", 9}, {"x-small", 10}, {"small", 13}, {"medium", 16},
        {"large", 18},   {"x-large", 24}, {"xx-large", 32}, {"xxx-large", 48}};
    if (auto it = kKeywords.find(v); it != kKeywords.end()) return it->second;
    if (v == "smaller") return parent / 1.2;
    if (v == "larger") return parent * 1.2;
    struct Unit {
        std::string_view suffix;
        double factor; // < 0 means relative to the parent size
    };
    static constexpr Unit kUnits[] = {{"px", 1.0}, {"rem", 16.0}, {"em", -1.0}, {"pt", 4.0 / 3.0}, {"%", -0.01}};
    for (const auto& u : kUnits) {
        if (v.size() > u.suffix.size() && v.ends_with(u.suffix)) {
            const auto n = parse_number(std::string_view(v).substr(0, v.size() - u.suffix.size()));
            if (!n || *n < 0) return std::nullopt;
            return u.factor < 0 ? *n * -u.factor * parent : *n * u.factor;
        }
    }
    if (v == "0") return 0.0;
    return std::nullopt;
}

std::optional<int> parse_font_weight(std::string_view raw, int parent) {
    const std::string v = lower(trim(raw));
    if (v == "normal") return 400;
    if (v == "bold") return 700;
    if (v == "bolder") return parent < 350 ? 400 : parent < 550 ? 700 : 900;
    if (v == "lighter") return parent < 550 ? 100 : parent < 750 ? 400 : 700;
    const auto n = parse_number(v);
    if (!n || *n < 1 || *n > 1000) return std::nullopt;
    return std::clamp(static_cast<int>(std::lround(*n / 100.0)) * 100, 100, 900);
}

std::optional<ColorRgba> try_color(std::string_view v) {
    try {
        return parse_color(v);
    } catch (const UnknownColor&) {
        return std::nullopt;
    }
}

/// Color component of a `background` shorthand; transparent when absent.
std::optional<ColorRgba> background_shorthand_color(std::string_view v) {
    for (auto token : split_top_level(v, ' ')) {
        token = trim(token);
        if (token.empty()) continue;
        if (auto c = try_color(token)) return c;
    }
    return ColorRgba::transparent();
}

bool border_value_present(std::string_view raw) {
    const std::string v = lower(trim(raw));
    bool any = false;
    for (auto token : split_top_level(v, ' ')) {
        token = trim(token);
        if (token.empty()) continue;
        any = true;
        if (token == "none" || token == "hidden" || token == "0" || token == "0px") return false;
    }
    return any;
}

void apply_declaration(ComputedStyle& s, const ComputedStyle& parent, const Declaration& d) {
    const std::string value = lower(d.value);
    if (value == "inherit") {
        if (d.property == "color") s.color = parent.color;
        else if (d.property == "background-color" || d.property == "background") s.background_color = parent.background_color;
        else if (d.property == "font-size") s.font_size = parent.font_size;
        else if (d.property == "font-weight") s.font_weight = parent.font_weight;
        else if (d.property == "position") s.position = parent.position;
        else if (d.property == "z-index") s.z_index = parent.z_index;
        else if (d.property == "display") s.display = parent.display;
        else if (d.property == "border") s.border_present = parent.border_present;
        return;
    }
    if (value == "initial" || value == "unset") {
        const ComputedStyle initial;
        if (d.property == "color") s.color = value == "unset" ? parent.color : initial.color;
        else if (d.property == "background-color" || d.property == "background") s.background_color = initial.background_color;
        else if (d.property == "font-size") s.font_size = value == "unset" ? parent.font_size : initial.font_size;
        else if (d.property == "font-weight") s.font_weight = value == "unset" ? parent.font_weight : initial.font_weight;
        else if (d.property == "position") s.position = initial.position;
        else if (d.property == "z-index") s.z_index = initial.z_index;
        else if (d.property == "display") s.display = initial.display;
        else if (d.property == "border") s.border_present = initial.border_present;
        return;
    }
    if (d.property == "color") {
        if (auto c = try_color(value)) s.color = *c;
    } else if (d.property == "background-color") {
        if (auto c = try_color(value)) s.background_color = *c;
    } else if (d.property == "background") {
        if (value == "none") s.background_color = ColorRgba::transparent();
        else if (auto c = background_shorthand_color(value)) s.background_color = *c;
    } else if (d.property == "font-size") {
        if (auto px = parse_font_size(value, parent.font_size)) s.font_size = *px;
    } else if (d.property == "font-weight") {
        if (auto w = parse_font_weight(value, parent.font_weight)) s.font_weight = *w;
    } else if (d.property == "position") {
        if (value == "static") s.position = Position::Static;
        else if (value == "relative") s.position = Position::Relative;
        else if (value == "absolute") s.position = Position::Absolute;
        else if (value == "fixed") s.position = Position::Fixed;
        else if (value == "sticky" || value == "-webkit-sticky") s.position = Position::Sticky;
    } else if (d.property == "z-index") {
        if (value == "auto") {
            s.z_index.reset();
        } else {
            int z = 0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), z);
            if (ec == std::errc{} && ptr == value.data() + value.size()) s.z_index = z;
        }
    } else if (d.property == "display") {
        if (!value.empty()) s.display = value == "none" ? Display::None : Display::Other;
    } else if (d.property == "border") {
        s.border_present = border_value_present(value);
    }
}

ComputedStyle inherit_from(const ComputedStyle& parent) {
    ComputedStyle s;
    s.color = parent.color;
    s.font_size = parent.font_size;
    s.font_weight = parent.font_weight;
    return s;
}

/// Rules bucketed by the key of their rightmost compound selector.
class RuleIndex {
public:
    explicit RuleIndex(std::span<const StyleRule> rules) : rules_(rules) {
        for (std::size_t i = 0; i < rules.size(); ++i) {
            const auto& last = rules[i].selector.chain.back();
            if (last.id) by_id_[*last.id].push_back(i);
            else if (!last.classes.empty()) by_class_[last.classes.front()].push_back(i);
            else if (last.tag) by_tag_[*last.tag].push_back(i);
            else universal_.push_back(i);
        }
    }

    /// Matching rules in ascending (specificity, source order).
    std::vector<const StyleRule*> matching(const DomTree& tree, NodeId element) const {
        const auto& n = tree[element];
        std::vector<std::size_t> candidates = universal_;
        auto add = [&](const auto& map, const std::string& key) {
            if (auto it = map.find(key); it != map.end()) {
                candidates.insert(candidates.end(), it->second.begin(), it->second.end());
            }
        };
        add(by_tag_, n.tag);
        if (const auto* id = n.attribute("id")) add(by_id_, *id);
        if (const auto* cls = n.attribute("class")) {
            std::size_t i = 0;
            const std::string_view v = *cls;
            while (i < v.size()) {
                while (i < v.size() && is_space(v[i])) ++i;
                const std::size_t start = i;
                while (i < v.size() && !is_space(v[i])) ++i;
                if (i > start) add(by_class_, std::string(v.substr(start, i - start)));
            }
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        std::vector<const StyleRule*> out;
        for (std::size_t i : candidates) {
            if (matches(tree, element, rules_[i].selector)) out.push_back(&rules_[i]);
        }
        std::stable_sort(out.begin(), out.end(), [](const StyleRule* a, const StyleRule* b) {
            if (a->specificity != b->specificity) return a->specificity < b->specificity;
            return a->source_order < b->source_order;
        });
        return out;
    }

private:
    std::span<const StyleRule> rules_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_id_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_class_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_tag_;
    std::vector<std::size_t> universal_;
};

ComputedStyle resolve(const DomTree& tree, NodeId element, const ComputedStyle& parent, const RuleIndex& index) {
    ComputedStyle s = inherit_from(parent);
    const auto& n = tree[element];
    if (n.has_attribute("hidden")) s.display = Display::None;
    for (const StyleRule* rule : index.matching(tree, element)) {
        for (const auto& d : rule->declarations) apply_declaration(s, parent, d);
    }
    if (const auto* inline_style = n.attribute("style")) {
        for (const auto& d : parse_declarations(*inline_style)) apply_declaration(s, parent, d);
    }
    return s;
}

} // namespace

std::optional<Selector> parse_selector(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    for (char c : text) {
        if (c == '>' || c == '+' || c == '~' || c == '[' || c == ':' || c == '(' || c == '\\' || c == '|') {
            return std::nullopt;
        }
    }
    Selector sel;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i == start) break;
        auto compound = parse_compound(text.substr(start, i - start));
        if (!compound) return std::nullopt;
        sel.chain.push_back(std::move(*compound));
    }
    if (sel.chain.empty()) return std::nullopt;
    return sel;
}

Specificity specificity_of(const Selector& selector) {
    Specificity s;
    for (const auto& c : selector.chain) {
        s.ids += c.id ? 1 : 0;
        s.classes += static_cast<int>(c.classes.size());
        s.tags += c.tag ? 1 : 0;
    }
    return s;
}

bool matches(const DomTree& tree, NodeId element, const Selector& selector) {
    const auto& chain = selector.chain;
    if (chain.empty() || !matches_compound(tree[element], chain.back())) return false;
    NodeId cursor = element;
    for (std::size_t k = chain.size() - 1; k-- > 0;) {
        bool found = false;
        while (const auto parent = tree[cursor].parent) {
            cursor = *parent;
            if (matches_compound(tree[cursor], chain[k])) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

std::vector<Declaration> parse_declarations(std::string_view block) {
    std::vector<Declaration> out;
    for (auto part : split_top_level(block, ';')) {
        const std::size_t colon = part.find(':');
        if (colon == std::string_view::npos) continue;
        std::string property = lower(trim(part.substr(0, colon)));
        if (!is_supported_property(property)) continue;
        std::string_view value = trim(part.substr(colon + 1));
        const std::string lowered = lower(value);
        if (const auto bang = lowered.rfind('!'); bang != std::string::npos &&
                                                  trim(std::string_view(lowered).substr(bang + 1)) == "important") {
            value = trim(value.substr(0, bang));
        }
        if (value.empty()) continue;
        out.push_back({std::move(property), std::string(value)});
    }
    return out;
}

std::vector<StyleRule> parse_stylesheet(std::string_view text, std::uint64_t starting_order) {
    const std::string css = strip_comments(text);
    const std::string_view s = css;
    std::vector<StyleRule> rules;
    std::uint64_t order = starting_order;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (is_space(s[i]) || s[i] == ';' || s[i] == '}')) ++i;
        if (i >= s.size()) break;
        if (s[i] == '@') {
            std::size_t j = i;
            while (j < s.size() && s[j] != ';' && s[j] != '{') ++j;
            i = (j < s.size() && s[j] == '{') ? skip_block(s, j) : j + 1;
            continue;
        }
        const std::size_t open = s.find('{', i);
        if (open == std::string_view::npos) break;
        const std::size_t end = skip_block(s, open);
        const std::string_view prelude = s.substr(i, open - i);
        const std::size_t body_end = (end > open + 1 && s[end - 1] == '}') ? end - 1 : end;
        const std::string_view body = s.substr(open + 1, body_end - open - 1);
        i = end;
        auto declarations = parse_declarations(body);
        if (declarations.empty()) continue;
        for (auto part : split_top_level(prelude, ',')) {
            auto selector = parse_selector(part);
            if (!selector) continue;
            StyleRule rule;
            rule.specificity = specificity_of(*selector);
            rule.selector = std::move(*selector);
            rule.declarations = declarations;
            rule.source_order = order++;
            rules.push_back(std::move(rule));
        }
    }
    return rules;
}

std::vector<NodeId> stylesheet_links(const DomTree& tree) {
    std::vector<NodeId> out;
    for (NodeId id : tree.elements()) {
        const auto& n = tree[id];
        if (n.tag != "link") continue;
        const auto* rel = n.attribute("rel");
        const auto* href = n.attribute("href");
        if (!rel || !href || trim(*href).empty()) continue;
        const std::string r = lower(*rel);
        bool is_sheet = false;
        for (auto token : split_top_level(r, ' ')) is_sheet = is_sheet || trim(token) == "stylesheet";
        if (is_sheet) out.push_back(id);
    }
    return out;
}

std::vector<StyleRule> collect_document_rules(const DomTree& tree,
                                              std::span<const std::optional<std::string>> linked_sheets) {
    std::vector<StyleRule> rules;
    const auto links = stylesheet_links(tree);
    std::size_t link_index = 0;
    for (NodeId id : tree.elements()) {
        const auto& n = tree[id];
        std::optional<std::string_view> sheet;
        if (n.tag == "style") {
            if (!n.children.empty()) sheet = std::string_view(tree[n.children.front()].text);
        } else if (link_index < links.size() && links[link_index] == id) {
            if (link_index < linked_sheets.size() && linked_sheets[link_index]) sheet = *linked_sheets[link_index];
            ++link_index;
        }
        if (!sheet) continue;
        auto parsed = parse_stylesheet(*sheet, rules.size());
        rules.insert(rules.end(), std::make_move_iterator(parsed.begin()), std::make_move_iterator(parsed.end()));
    }
    return rules;
}

std::string_view to_string(Position p) {
    switch (p) {
    case Position::Static: return "static";
    case Position::Relative: return "relative";
    case Position::Absolute: return "absolute";
    case Position::Fixed: return "fixed";
    case Position::Sticky: return "sticky";
    }
    return "static";
}

StyleMap::StyleMap(const DomTree& tree, std::span<const StyleRule> rules)
    : styles_(tree.size()), hidden_(tree.size(), false) {
    const RuleIndex index(rules);
    // Ids are in document order, so parents are always resolved first.
    for (std::uint32_t i = 1; i < tree.size(); ++i) {
        const NodeId id{i};
        const auto& n = tree[id];
        const NodeId parent = *n.parent;
        if (n.is_element()) {
            styles_[i] = resolve(tree, id, styles_[parent.value], index);
        } else {
            styles_[i] = styles_[parent.value];
        }
        hidden_[i] = hidden_[parent.value] || (n.is_element() && styles_[i].display == Display::None);
    }
}

const ComputedStyle& StyleMap::at(NodeId node) const {
    if (node.value >= styles_.size()) throw PreconditionError("node id outside the styled tree");
    return styles_[node.value];
}

bool StyleMap::hidden(NodeId node) const {
    if (node.value >= hidden_.size()) throw PreconditionError("node id outside the styled tree");
    return hidden_[node.value];
}

ComputedStyle computed_style(const DomTree& tree, NodeId node, std::span<const StyleRule> rules) {
    if (!tree[node].is_element()) throw PreconditionError("computed_style needs an element node");
    std::vector<NodeId> chain;
    for (std::optional<NodeId> cur = node; cur; cur = tree[*cur].parent) {
        if (tree[*cur].is_element()) chain.push_back(*cur);
    }
    const RuleIndex index(rules);
    ComputedStyle style;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) style = resolve(tree, *it, style, index);
    return style;
}

} // namespace bannerscope::css
