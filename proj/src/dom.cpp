#include "bannerscope/dom.hpp"

#include "bannerscope/error.hpp"
#include "bannerscope/text_util.hpp"

#include <algorithm>
#include <array>

namespace bannerscope::dom {

namespace {

void require(const DomTree& tree, NodeId id) {
    if (!tree.contains(id)) {
        throw PreconditionError("node id " + std::to_string(id.value) + " is not in the tree (size " +
                                std::to_string(tree.size()) + ")");
    }
}

template <typename Sep>
std::string collect_text(const DomTree& tree, NodeId node, Sep separator) {
    require(tree, node);
    std::string raw;
    const auto nodes = tree.nodes();
    const auto& start = nodes[node.value];
    if (start.is_element() && is_raw_text_element(start.tag)) return {};
    std::uint32_t i = node.value;
    const std::uint32_t end = start.subtree_end.value;
    while (i < end) {
        const DomNode& n = nodes[i];
        if (n.is_element() && is_raw_text_element(n.tag)) {
            i = n.subtree_end.value;
            continue;
        }
        if (n.is_text()) {
            if (!raw.empty()) raw += separator;
            raw += n.text;
        }
        ++i;
    }
    return text::collapse_whitespace(raw);
}

void escape_into(std::string& out, std::string_view s, bool attribute) {
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += attribute ? "<" : "&lt;"; break;
        case '>': out += attribute ? ">" : "&gt;"; break;
        case '"': out += attribute ? "&quot;" : "\""; break;
        default: out.push_back(c);
        }
    }
}

std::vector<Attribute> apply_overrides(const DomNode& node, const std::vector<Attribute>* extra) {
    std::vector<Attribute> attrs = node.attributes;
    if (extra == nullptr) return attrs;
    for (const Attribute& add : *extra) {
        auto it = std::find_if(attrs.begin(), attrs.end(),
                               [&](const Attribute& a) { return a.name == add.name; });
        if (it == attrs.end()) {
            attrs.push_back(add);
        } else if (add.name == "style") {
            std::string merged = it->value;
            while (!merged.empty() && (merged.back() == ' ' || merged.back() == '\t')) merged.pop_back();
            if (!merged.empty() && merged.back() != ';') merged.push_back(';');
            merged += add.value;
            it->value = std::move(merged);
        } else {
            it->value = add.value;
        }
    }
    return attrs;
}

} // namespace

const std::string* DomNode::attribute(std::string_view name) const noexcept {
    for (const auto& a : attributes) {
        if (a.name == name) return &a.value;
    }
    return nullptr;
}

const DomNode& DomTree::node(NodeId id) const {
    require(*this, id);
    return nodes_[id.value];
}

bool DomTree::is_ancestor_or_self(NodeId ancestor, NodeId node) const {
    require(*this, ancestor);
    require(*this, node);
    return ancestor <= node && node < nodes_[ancestor.value].subtree_end;
}

std::vector<NodeId> DomTree::elements() const {
    std::vector<NodeId> out;
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].is_element()) out.push_back(NodeId{i});
    }
    return out;
}

DomTree::Builder::Builder() {
    DomNode doc;
    doc.kind = NodeKind::Document;
    tree_.nodes_.push_back(std::move(doc));
}

NodeId DomTree::Builder::append(NodeId parent, DomNode node) {
    require(tree_, parent);
    // The parent must lie on the path from the root to the last node,
    // otherwise document order and id order would diverge.
    NodeId cursor{static_cast<std::uint32_t>(tree_.nodes_.size() - 1)};
    while (cursor != parent) {
        const auto& p = tree_.nodes_[cursor.value].parent;
        if (!p) throw PreconditionError("builder: parent is not on the open path");
        cursor = *p;
    }
    auto& parent_node = tree_.nodes_[parent.value];
    if (parent_node.kind == NodeKind::Text || parent_node.kind == NodeKind::Comment) {
        throw PreconditionError("builder: text and comment nodes cannot have children");
    }
    const NodeId id{static_cast<std::uint32_t>(tree_.nodes_.size())};
    node.parent = parent;
    node.depth = parent_node.depth + 1;
    parent_node.children.push_back(id);
    tree_.nodes_.push_back(std::move(node));
    return id;
}

NodeId DomTree::Builder::add_element(NodeId parent, std::string tag, std::vector<Attribute> attributes) {
    DomNode n;
    n.kind = NodeKind::Element;
    n.tag = std::move(tag);
    n.attributes = std::move(attributes);
    return append(parent, std::move(n));
}

NodeId DomTree::Builder::add_text(NodeId parent, std::string_view text) {
    require(tree_, parent);
    auto& p = tree_.nodes_[parent.value];
    if (!p.children.empty()) {
        const NodeId last = p.children.back();
        if (tree_.nodes_[last.value].kind == NodeKind::Text && last.value + 1 == tree_.nodes_.size()) {
            tree_.nodes_[last.value].text.append(text);
            return last;
        }
    }
    DomNode n;
    n.kind = NodeKind::Text;
    n.text = std::string(text);
    return append(parent, std::move(n));
}

NodeId DomTree::Builder::add_comment(NodeId parent, std::string text) {
    DomNode n;
    n.kind = NodeKind::Comment;
    n.text = std::move(text);
    return append(parent, std::move(n));
}

void DomTree::Builder::merge_attributes(NodeId element, const std::vector<Attribute>& attributes) {
    require(tree_, element);
    auto& n = tree_.nodes_[element.value];
    for (const auto& a : attributes) {
        if (!n.has_attribute(a.name)) n.attributes.push_back(a);
    }
}

DomTree DomTree::Builder::finish() && {
    auto& nodes = tree_.nodes_;
    for (std::size_t i = nodes.size(); i-- > 0;) {
        auto& n = nodes[i];
        n.subtree_end = n.children.empty() ? NodeId{static_cast<std::uint32_t>(i + 1)}
                                           : nodes[n.children.back().value].subtree_end;
    }
    return std::move(tree_);
}

bool is_void_element(std::string_view tag) noexcept {
    static constexpr std::array<std::string_view, 14> kVoid{
        "area", "base", "br", "col", "embed", "hr", "img", "input",
        "link", "meta", "param", "source", "track", "wbr"};
    return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

bool is_raw_text_element(std::string_view tag) noexcept {
    return tag == "script" || tag == "style";
}

std::string subtree_text(const DomTree& tree, NodeId node) {
    return collect_text(tree, node, "");
}

std::string joined_text(const DomTree& tree, NodeId node) {
    return collect_text(tree, node, ' ');
}

NodeId lowest_common_ancestor(const DomTree& tree, NodeId a, NodeId b) {
    require(tree, a);
    require(tree, b);
    const auto nodes = tree.nodes();
    while (nodes[a.value].depth > nodes[b.value].depth) a = *nodes[a.value].parent;
    while (nodes[b.value].depth > nodes[a.value].depth) b = *nodes[b.value].parent;
    while (a != b) {
        a = *nodes[a.value].parent;
        b = *nodes[b.value].parent;
    }
    return a;
}

std::string serialize(const DomTree& tree, const AttributeOverrides& overrides) {
    for (const auto& [id, attrs] : overrides) {
        require(tree, id);
        if (!tree[id].is_element()) {
            throw PreconditionError("override target " + std::to_string(id.value) + " is not an element");
        }
    }

    std::string out = "<!DOCTYPE html>";
    struct Frame {
        NodeId id;
        std::size_t next = 0;
    };
    std::vector<Frame> stack{{tree.root(), 0}};
    while (!stack.empty()) {
        Frame& f = stack.back();
        const DomNode& n = tree[f.id];
        if (f.next == n.children.size()) {
            if (n.is_element() && !is_void_element(n.tag)) out += "</" + n.tag + ">";
            stack.pop_back();
            continue;
        }
        const NodeId child_id = n.children[f.next++];
        const DomNode& c = tree[child_id];
        switch (c.kind) {
        case NodeKind::Text:
            if (n.is_element() && is_raw_text_element(n.tag)) {
                out += c.text;
            } else {
                escape_into(out, c.text, false);
            }
            break;
        case NodeKind::Comment:
            out += "<!--" + c.text + "-->";
            break;
        case NodeKind::Element: {
            auto it = overrides.find(child_id);
            const auto attrs = apply_overrides(c, it == overrides.end() ? nullptr : &it->second);
            out += "<" + c.tag;
            for (const auto& a : attrs) {
                out += " " + a.name + "=\"";
                escape_into(out, a.value, true);
                out += "\"";
            }
            out += ">";
            if (!is_void_element(c.tag)) stack.push_back({child_id, 0});
            break;
        }
        case NodeKind::Document:
            break;
        }
    }
    return out;
}

std::vector<std::size_t> node_path(const DomTree& tree, NodeId node) {
    require(tree, node);
    std::vector<std::size_t> path;
    NodeId cur = node;
    while (const auto& parent = tree[cur].parent) {
        const auto& siblings = tree[*parent].children;
        path.push_back(static_cast<std::size_t>(std::find(siblings.begin(), siblings.end(), cur) - siblings.begin()));
        cur = *parent;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::optional<NodeId> resolve_path(const DomTree& tree, std::span<const std::size_t> path) {
    NodeId cur = tree.root();
    for (std::size_t index : path) {
        const auto& children = tree[cur].children;
        if (index >= children.size()) return std::nullopt;
        cur = children[index];
    }
    return cur;
}

bool structurally_equal(const DomTree& a, const DomTree& b) {
    if (a.size() != b.size()) return false;
    for (std::uint32_t i = 0; i < a.size(); ++i) {
        const DomNode& x = a.nodes()[i];
        const DomNode& y = b.nodes()[i];
        if (x.kind != y.kind || x.tag != y.tag || x.attributes != y.attributes || x.text != y.text ||
            x.parent != y.parent || x.children != y.children) {
            return false;
        }
    }
    return true;
}

} // namespace bannerscope::dom
