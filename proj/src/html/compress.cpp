#include "shopx/html/compress.hpp"

#include <algorithm>

#include "shopx/common/text.hpp"
#include "shopx/html/dom.hpp"

namespace shopx::html {

std::string_view to_string(Variant v) noexcept {
    return v == Variant::HtmlCompressed ? "HTML_COMPRESSED" : "TEXT";
}

Variant parse_variant(std::string_view s) {
    std::string lower = text::to_lower_ascii(s);
    if (lower == "html" || lower == "html_compressed") return Variant::HtmlCompressed;
    if (lower == "text") return Variant::Text;
    throw PreconditionViolation("unknown variant '" + std::string(s) + "'");
}

bool is_banned_element(std::string_view tag) noexcept {
    return std::find(kBannedElements.begin(), kBannedElements.end(), tag) != kBannedElements.end();
}

std::int64_t count_tokens(std::string_view content) noexcept {
    return static_cast<std::int64_t>((content.size() + 3) / 4);
}

namespace {

bool is_whitespace_only(std::string_view s) {
    return text::collapse_whitespace(s).empty();
}

void prune(Node& node) {
    node.remove_children_if([](const Node& c) {
        if (c.kind() == NodeKind::Comment || c.kind() == NodeKind::CData) return true;
        return c.is_element() && is_banned_element(c.name());
    });

    // Removing elements can leave text nodes adjacent; merge them so the tree
    // matches what re-parsing the serialization would produce.
    auto& kids = node.mutable_children();
    std::vector<std::unique_ptr<Node>> merged;
    merged.reserve(kids.size());
    for (auto& c : kids) {
        if (c->is_text() && !merged.empty() && merged.back()->is_text()) {
            merged.back()->data() += c->data();
        } else {
            merged.push_back(std::move(c));
        }
    }
    kids = std::move(merged);
    node.remove_children_if([](const Node& c) { return c.is_text() && is_whitespace_only(c.data()); });

    if (node.is_element()) {
        auto& attrs = node.attributes();
        attrs.erase(std::remove_if(attrs.begin(), attrs.end(),
                                   [](const Attribute& a) { return a.name != "class" && a.name != "id"; }),
                    attrs.end());
    }
    for (const auto& c : node.children()) prune(*c);
}

bool has_content(const Node& node) {
    for (const auto& c : node.children()) {
        if (c->is_element() || c->kind() == NodeKind::Doctype) return true;
        if (c->is_text() && !is_whitespace_only(c->data())) return true;
    }
    return false;
}

bool is_block_element(std::string_view tag) {
    static constexpr std::array<std::string_view, 41> kBlocks = {
        "address", "article", "aside", "blockquote", "body", "br", "caption", "dd", "details",
        "dialog", "div", "dl", "dt", "fieldset", "figcaption", "figure", "form", "h1", "h2",
        "h3", "h4", "h5", "h6", "hr", "html", "li", "main", "nav", "ol", "p", "pre",
        "section", "summary", "table", "tbody", "tfoot", "thead", "tr", "ul", "legend", "menu"};
    return std::find(kBlocks.begin(), kBlocks.end(), tag) != kBlocks.end();
}

class TextCollector {
public:
    void walk(const Node& node) {
        if (node.is_text()) {
            std::string piece = text::collapse_whitespace(node.data());
            if (piece.empty()) return;
            if (!line_.empty()) line_.push_back(' ');
            line_ += piece;
            return;
        }
        if (node.kind() != NodeKind::Element && node.kind() != NodeKind::Document) return;
        bool block = node.is_element() && is_block_element(node.name());
        if (block) flush();
        for (const auto& c : node.children()) walk(*c);
        if (block) flush();
    }

    std::string finish() {
        flush();
        std::string out;
        for (const auto& l : lines_) {
            if (!out.empty()) out.push_back('\n');
            out += l;
        }
        return out;
    }

private:
    void flush() {
        if (!line_.empty()) lines_.push_back(std::move(line_));
        line_.clear();
    }

    std::vector<std::string> lines_;
    std::string line_;
};

} // namespace

CompressedDocument compress_html(const RawDocument& doc) {
    Document tree = parse(doc.html);
    if (!has_content(tree.root())) {
        throw UnparsableDocument("page '" + doc.page_id + "' yields an empty document tree");
    }
    prune(tree.root());
    CompressedDocument out;
    out.page_id = doc.page_id;
    out.variant = Variant::HtmlCompressed;
    out.content = serialize(tree.root());
    out.token_count = count_tokens(out.content);
    return out;
}

CompressedDocument extract_text(const CompressedDocument& doc) {
    if (doc.variant != Variant::HtmlCompressed) {
        throw WrongVariant("extract_text expects an HTML_COMPRESSED document, got TEXT for '" + doc.page_id + "'");
    }
    Document tree = parse(doc.content);
    TextCollector collector;
    collector.walk(tree.root());
    CompressedDocument out;
    out.page_id = doc.page_id;
    out.variant = Variant::Text;
    out.content = collector.finish();
    out.token_count = count_tokens(out.content);
    return out;
}

} // namespace shopx::html
