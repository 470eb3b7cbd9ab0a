#include "bannerscope/clickables.hpp"

#include "bannerscope/error.hpp"
#include "bannerscope/text_util.hpp"

#include <algorithm>

namespace bannerscope::clickables {

namespace {

constexpr std::size_t kMaxLabelLength = 80;

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_edge_strippable(char32_t cp) { return text::is_space(cp) || !text::is_word_char(cp); }

std::u32string strip_edges(std::u32string s) {
    std::size_t start = 0;
    while (start < s.size() && is_edge_strippable(s[start])) ++start;
    std::size_t end = s.size();
    while (end > start && is_edge_strippable(s[end - 1])) --end;
    return s.substr(start, end - start);
}

} // namespace

std::string_view to_string(DetectionSource source) {
    switch (source) {
    case DetectionSource::Tag: return "tag";
    case DetectionSource::RoleAttr: return "role_attr";
    case DetectionSource::OnclickAttr: return "onclick_attr";
    }
    return "tag";
}

std::optional<DetectionSource> clickable_source(const dom::DomNode& n) {
    if (!n.is_element()) return std::nullopt;
    if (n.tag == "a" || n.tag == "button") return DetectionSource::Tag;
    if (n.tag == "input") {
        const auto* type = n.attribute("type");
        const std::string t = type ? ascii_lower(*type) : std::string();
        if (t == "button" || t == "submit") return DetectionSource::Tag;
    }
    if (const auto* role = n.attribute("role"); role && ascii_lower(*role) == "button") {
        return DetectionSource::RoleAttr;
    }
    if (n.has_attribute("onclick")) return DetectionSource::OnclickAttr;
    return std::nullopt;
}

std::string normalize_label(std::string_view raw) {
    const std::string collapsed = text::collapse_whitespace(text::to_lower(raw));
    std::u32string s = strip_edges(text::decode_utf8(collapsed));
    if (s.size() > kMaxLabelLength) {
        s.resize(kMaxLabelLength);
        s = strip_edges(std::move(s));
    }
    return text::encode_utf8(s);
}

std::vector<ClickableElement> extract_clickables(const dom::DomTree& tree, dom::NodeId root,
                                                 const css::StyleMap& styles) {
    const auto& root_node = tree[root];
    if (!root_node.is_element()) throw PreconditionError("extract_clickables needs an element root");

    std::vector<dom::NodeId> matched;
    for (std::uint32_t i = root.value; i < root_node.subtree_end.value; ++i) {
        const dom::NodeId id{i};
        if (clickable_source(tree[id]) && !styles.hidden(id)) matched.push_back(id);
    }
    // Innermost wins: drop any match that contains a later match. Ids are in
    // document order, so descendants directly follow their ancestors.
    std::vector<dom::NodeId> innermost;
    for (std::size_t k = 0; k < matched.size(); ++k) {
        const bool has_inner = k + 1 < matched.size() && tree.is_ancestor_or_self(matched[k], matched[k + 1]);
        if (!has_inner) innermost.push_back(matched[k]);
    }

    std::vector<ClickableElement> out;
    for (dom::NodeId id : innermost) {
        const auto& n = tree[id];
        std::string label;
        if (n.tag == "input") {
            const auto* value = n.attribute("value");
            label = normalize_label(value ? *value : "");
        } else {
            label = normalize_label(dom::subtree_text(tree, id));
        }
        if (label.empty()) {
            // Icon-only controls ("×") are usually labelled for assistive tech.
            if (const auto* aria = n.attribute("aria-label")) label = normalize_label(*aria);
        }
        if (label.empty()) continue;
        out.push_back({id, n.tag, std::move(label), *clickable_source(n)});
    }
    return out;
}

} // namespace bannerscope::clickables
