#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace shopx::html {

enum class NodeKind { Document, Element, Text, Comment, CData, Doctype };

struct Attribute {
    std::string name;
    std::string value;
};

/// A DOM node. Elements carry a lowercase tag name; text nodes carry decoded
/// character data; comments, CDATA sections and doctypes carry their raw body.
class Node {
public:
    explicit Node(NodeKind kind, std::string name = {}, std::string data = {})
        : kind_(kind), name_(std::move(name)), data_(std::move(data)) {}

    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    NodeKind kind() const noexcept { return kind_; }
    bool is_element() const noexcept { return kind_ == NodeKind::Element; }
    bool is_text() const noexcept { return kind_ == NodeKind::Text; }

    const std::string& name() const noexcept { return name_; }
    const std::string& data() const noexcept { return data_; }
    std::string& data() noexcept { return data_; }

    const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
    std::vector<Attribute>& attributes() noexcept { return attributes_; }
    const std::string* attribute(std::string_view name) const;
    bool has_class(std::string_view cls) const;

    Node* parent() const noexcept { return parent_; }
    const std::vector<std::unique_ptr<Node>>& children() const noexcept { return children_; }
    std::vector<std::unique_ptr<Node>>& mutable_children() noexcept { return children_; }

    Node& append(std::unique_ptr<Node> child);
    /// Removes children for which `pred` holds; returns how many were removed.
    std::size_t remove_children_if(const std::function<bool(const Node&)>& pred);
    std::unique_ptr<Node> clone() const;

    /// Position among the parent's element children (0-based), or 0 for the root.
    std::size_t element_index() const;
    const Node* previous_element_sibling() const;

private:
    NodeKind kind_;
    std::string name_;
    std::string data_;
    std::vector<Attribute> attributes_;
    std::vector<std::unique_ptr<Node>> children_;
    Node* parent_ = nullptr;
};

/// Owns a parsed tree rooted at a Document node.
class Document {
public:
    Document();
    explicit Document(std::unique_ptr<Node> root);

    Document(Document&&) noexcept = default;
    Document& operator=(Document&&) noexcept = default;

    Node& root() noexcept { return *root_; }
    const Node& root() const noexcept { return *root_; }

    Document clone() const;

private:
    std::unique_ptr<Node> root_;
};

bool is_void_element(std::string_view tag);
bool is_raw_text_element(std::string_view tag);

/// Lenient HTML parse: never throws, recovers from unclosed and stray tags.
Document parse(std::string_view html);

std::string serialize(const Node& node);
std::string serialize_children(const Node& node);

/// Concatenated character data of all descendant text nodes.
std::string text_content(const Node& node);

/// Visits every node in document order (pre-order), including `node` itself.
void for_each_node(const Node& node, const std::function<void(const Node&)>& fn);

std::string decode_entities(std::string_view s);

} // namespace shopx::html
