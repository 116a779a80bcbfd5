#include "shopx/html/dom.hpp"

#include <algorithm>
#include <array>

namespace shopx::html {

const std::string* Node::attribute(std::string_view name) const {
    for (const auto& a : attributes_) {
        if (a.name == name) return &a.value;
    }
    return nullptr;
}

bool Node::has_class(std::string_view cls) const {
    const std::string* value = attribute("class");
    if (value == nullptr || cls.empty()) return false;
    std::string_view v = *value;
    std::size_t i = 0;
    while (i < v.size()) {
        while (i < v.size() && (v[i] == ' ' || v[i] == '\t' || v[i] == '\n' || v[i] == '\r' || v[i] == '\f')) ++i;
        std::size_t j = i;
        while (j < v.size() && !(v[j] == ' ' || v[j] == '\t' || v[j] == '\n' || v[j] == '\r' || v[j] == '\f')) ++j;
        if (j > i && v.substr(i, j - i) == cls) return true;
        i = j;
    }
    return false;
}

Node& Node::append(std::unique_ptr<Node> child) {
    child->parent_ = this;
    children_.push_back(std::move(child));
    return *children_.back();
}

std::size_t Node::remove_children_if(const std::function<bool(const Node&)>& pred) {
    auto it = std::remove_if(children_.begin(), children_.end(),
                             [&](const std::unique_ptr<Node>& c) { return pred(*c); });
    auto removed = static_cast<std::size_t>(children_.end() - it);
    children_.erase(it, children_.end());
    return removed;
}

std::unique_ptr<Node> Node::clone() const {
    auto copy = std::make_unique<Node>(kind_, name_, data_);
    copy->attributes_ = attributes_;
    for (const auto& c : children_) copy->append(c->clone());
    return copy;
}

std::size_t Node::element_index() const {
    if (parent_ == nullptr) return 0;
    std::size_t index = 0;
    for (const auto& c : parent_->children_) {
        if (c.get() == this) return index;
        if (c->is_element()) ++index;
    }
    return index;
}

const Node* Node::previous_element_sibling() const {
    if (parent_ == nullptr) return nullptr;
    const Node* prev = nullptr;
    for (const auto& c : parent_->children_) {
        if (c.get() == this) return prev;
        if (c->is_element()) prev = c.get();
    }
    return nullptr;
}

Document::Document() : root_(std::make_unique<Node>(NodeKind::Document)) {}

Document::Document(std::unique_ptr<Node> root) : root_(std::move(root)) {}

Document Document::clone() const { return Document(root_->clone()); }

bool is_void_element(std::string_view tag) {
    static constexpr std::array<std::string_view, 16> kVoid = {
        "area", "base", "br", "col", "embed", "hr", "img", "input",
        "keygen", "link", "meta", "param", "source", "track", "wbr", "basefont"};
    return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

bool is_raw_text_element(std::string_view tag) { return tag == "script" || tag == "style"; }

namespace {

void escape_into(std::string& out, std::string_view s, bool attribute) {
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<':
            if (attribute) out.push_back(c);
            else out += "&lt;";
            break;
        case '>':
            if (attribute) out.push_back(c);
            else out += "&gt;";
            break;
        case '"':
            if (attribute) out += "&quot;";
            else out.push_back(c);
            break;
        default: out.push_back(c);
        }
    }
}

void serialize_into(std::string& out, const Node& node, bool raw_text) {
    switch (node.kind()) {
    case NodeKind::Document:
        for (const auto& c : node.children()) serialize_into(out, *c, false);
        break;
    case NodeKind::Text:
        if (raw_text) out += node.data();
        else escape_into(out, node.data(), false);
        break;
    case NodeKind::Comment:
        out += "<!--";
        out += node.data();
        out += "-->";
        break;
    case NodeKind::CData:
        out += "<![CDATA[";
        out += node.data();
        out += "]]>";
        break;
    case NodeKind::Doctype:
        out += "<!";
        out += node.data();
        out += ">";
        break;
    case NodeKind::Element: {
        out.push_back('<');
        out += node.name();
        for (const auto& a : node.attributes()) {
            out.push_back(' ');
            out += a.name;
            out += "=\"";
            escape_into(out, a.value, true);
            out.push_back('"');
        }
        out.push_back('>');
        if (is_void_element(node.name())) break;
        bool raw = is_raw_text_element(node.name());
        for (const auto& c : node.children()) serialize_into(out, *c, raw);
        out += "</";
        out += node.name();
        out.push_back('>');
        break;
    }
    }
}

void text_into(std::string& out, const Node& node) {
    if (node.is_text()) {
        out += node.data();
        return;
    }
    for (const auto& c : node.children()) text_into(out, *c);
}

} // namespace

std::string serialize(const Node& node) {
    std::string out;
    serialize_into(out, node, false);
    return out;
}

std::string serialize_children(const Node& node) {
    std::string out;
    bool raw = node.is_element() && is_raw_text_element(node.name());
    for (const auto& c : node.children()) serialize_into(out, *c, raw);
    return out;
}

std::string text_content(const Node& node) {
    std::string out;
    text_into(out, node);
    return out;
}

void for_each_node(const Node& node, const std::function<void(const Node&)>& fn) {
    fn(node);
    for (const auto& c : node.children()) for_each_node(*c, fn);
}

} // namespace shopx::html
