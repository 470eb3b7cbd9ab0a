#pragma once

// Immutable DOM tree built by an error-tolerant HTML parser.
//
// Nodes live in an arena indexed by NodeId. The parser only ever appends at
// the end of document order, so NodeId order *is* document (pre-)order and
// every subtree occupies the contiguous id range [id, subtree_end(id)).

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bannerscope::dom {

struct NodeId {
    std::uint32_t value = 0;

    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

enum class NodeKind : std::uint8_t { Document, Element, Text, Comment };

struct Attribute {
    std::string name;  // lowercase
    std::string value; // verbatim after entity decoding

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct DomNode {
    NodeKind kind = NodeKind::Element;
    std::string tag;                   // elements only
    std::vector<Attribute> attributes; // elements only, unique names, source order
    std::string text;                  // text and comment nodes
    std::optional<NodeId> parent;
    std::vector<NodeId> children;
    std::uint32_t depth = 0;
    NodeId subtree_end{};              // one past the last descendant

    bool is_element() const noexcept { return kind == NodeKind::Element; }
    bool is_text() const noexcept { return kind == NodeKind::Text; }
    bool is_element(std::string_view name) const noexcept {
        return kind == NodeKind::Element && tag == name;
    }

    /// Value of the named attribute, or nullptr when absent.
    const std::string* attribute(std::string_view name) const noexcept;
    bool has_attribute(std::string_view name) const noexcept { return attribute(name) != nullptr; }
};

class DomTree {
public:
    class Builder;

    NodeId root() const noexcept { return NodeId{0}; }
    std::size_t size() const noexcept { return nodes_.size(); }
    bool contains(NodeId id) const noexcept { return id.value < nodes_.size(); }

    /// Throws PreconditionError for ids outside this tree.
    const DomNode& node(NodeId id) const;
    const DomNode& operator[](NodeId id) const { return node(id); }
    std::span<const DomNode> nodes() const noexcept { return nodes_; }

    std::optional<NodeId> html() const noexcept { return html_; }
    std::optional<NodeId> head() const noexcept { return head_; }
    std::optional<NodeId> body() const noexcept { return body_; }

    /// True when `ancestor` is `node` or one of its ancestors. O(1).
    bool is_ancestor_or_self(NodeId ancestor, NodeId node) const;

    /// All element ids in document order.
    std::vector<NodeId> elements() const;

private:
    std::vector<DomNode> nodes_;
    std::optional<NodeId> html_;
    std::optional<NodeId> head_;
    std::optional<NodeId> body_;
};

/// Appends nodes in document order. A new node's parent must be an
/// ancestor-or-self of the most recently added node.
class DomTree::Builder {
public:
    Builder();

    NodeId add_element(NodeId parent, std::string tag, std::vector<Attribute> attributes = {});
    /// Merges into a trailing text sibling when there is one.
    NodeId add_text(NodeId parent, std::string_view text);
    NodeId add_comment(NodeId parent, std::string text);
    /// Adds attributes the element does not have yet.
    void merge_attributes(NodeId element, const std::vector<Attribute>& attributes);

    void set_html(NodeId id) { tree_.html_ = id; }
    void set_head(NodeId id) { tree_.head_ = id; }
    void set_body(NodeId id) { tree_.body_ = id; }

    const DomNode& node(NodeId id) const { return tree_.node(id); }

    DomTree finish() &&;

private:
    NodeId append(NodeId parent, DomNode node);

    DomTree tree_;
};

/// Elements that never receive children.
bool is_void_element(std::string_view tag) noexcept;
/// script/style: contents are kept verbatim and excluded from text extraction.
bool is_raw_text_element(std::string_view tag) noexcept;

/// Parses any input; invalid UTF-8 is replaced, html/body are synthesized.
DomTree parse_html(std::string_view input);

/// Descendant text in document order (script/style skipped), whitespace
/// collapsed and trimmed.
std::string subtree_text(const DomTree& tree, NodeId node);

/// Like subtree_text but separates adjacent text nodes with a space, so
/// block boundaries do not glue words together.
std::string joined_text(const DomTree& tree, NodeId node);

NodeId lowest_common_ancestor(const DomTree& tree, NodeId a, NodeId b);

/// Attribute insertions applied during serialization. A `style` insertion is
/// merged into an existing style attribute with ";"; other names replace.
using AttributeOverrides = std::map<NodeId, std::vector<Attribute>>;

std::string serialize(const DomTree& tree, const AttributeOverrides& overrides = {});

/// Child-index path from the document root to `node` (empty for the root).
std::vector<std::size_t> node_path(const DomTree& tree, NodeId node);
std::optional<NodeId> resolve_path(const DomTree& tree, std::span<const std::size_t> path);

/// Same node kinds, tags, attributes, texts and child order.
bool structurally_equal(const DomTree& a, const DomTree& b);

} // namespace bannerscope::dom
