#include "shopx/html/dom.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>

#include "shopx/common/text.hpp"

namespace shopx::html {

namespace {

struct NamedEntity {
    std::string_view name;
    char32_t codepoint;
};

// Entities that show up on German shop pages; numeric references cover the rest.
constexpr std::array<NamedEntity, 40> kEntities = {{
    {"amp", U'&'},     {"lt", U'<'},       {"gt", U'>'},       {"quot", U'"'},
    {"apos", U'\''},   {"nbsp", 0xA0},     {"auml", 0xE4},     {"ouml", 0xF6},
    {"uuml", 0xFC},    {"Auml", 0xC4},     {"Ouml", 0xD6},     {"Uuml", 0xDC},
    {"szlig", 0xDF},   {"euro", 0x20AC},   {"copy", 0xA9},     {"reg", 0xAE},
    {"trade", 0x2122}, {"deg", 0xB0},      {"middot", 0xB7},   {"ndash", 0x2013},
    {"mdash", 0x2014}, {"hellip", 0x2026}, {"laquo", 0xAB},    {"raquo", 0xBB},
    {"bdquo", 0x201E}, {"ldquo", 0x201C},  {"rdquo", 0x201D},  {"lsquo", 0x2018},
    {"rsquo", 0x2019}, {"sbquo", 0x201A},  {"times", 0xD7},    {"frac12", 0xBD},
    {"eacute", 0xE9},  {"egrave", 0xE8},   {"agrave", 0xE0},   {"aacute", 0xE1},
    {"ccedil", 0xE7},  {"micro", 0xB5},    {"shy", 0xAD},      {"bull", 0x2022},
}};

void append_utf8(std::string& out, char32_t cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_name_char(char c) { return is_alpha(c) || is_digit(c) || c == '-' || c == '_' || c == ':' || c == '.'; }

struct Token {
    enum class Kind { Text, StartTag, EndTag, Comment, CData, Doctype } kind;
    std::string name;
    std::string data;
    std::vector<Attribute> attributes;
    bool self_closing = false;
};

class Tokenizer {
public:
    explicit Tokenizer(std::string_view src) : src_(src) {}

    bool next(Token& tok) {
        if (pos_ >= src_.size()) return false;
        if (!raw_end_tag_.empty()) return raw_text(tok);
        if (src_[pos_] == '<' && pos_ + 1 < src_.size()) {
            char c = src_[pos_ + 1];
            if (c == '!') return markup_declaration(tok);
            if (c == '?') return bogus_comment(tok, pos_ + 2);
            if (c == '/' && pos_ + 2 < src_.size() && is_alpha(src_[pos_ + 2])) return end_tag(tok);
            if (c == '/' && pos_ + 2 < src_.size() && src_[pos_ + 2] == '>') {
                pos_ += 3;
                return next(tok);
            }
            if (is_alpha(c)) return start_tag(tok);
        }
        return text(tok);
    }

private:
    bool text(Token& tok) {
        std::size_t end = src_.find('<', pos_ + 1);
        if (end == std::string_view::npos) end = src_.size();
        tok = Token{Token::Kind::Text, {}, decode_entities(src_.substr(pos_, end - pos_)), {}, false};
        pos_ = end;
        return true;
    }

    bool raw_text(Token& tok) {
        // Scan for "</name" case-insensitively.
        std::size_t p = pos_;
        std::size_t end = src_.size();
        while (p < src_.size()) {
            p = src_.find("</", p);
            if (p == std::string_view::npos) break;
            if (text::starts_with_icase(src_.substr(p + 2), raw_end_tag_)) {
                std::size_t after = p + 2 + raw_end_tag_.size();
                if (after >= src_.size() || !is_name_char(src_[after])) {
                    end = p;
                    break;
                }
            }
            p += 2;
        }
        if (end == pos_) {
            raw_end_tag_.clear();
            return next(tok);
        }
        std::string body(src_.substr(pos_, end - pos_));
        tok = Token{Token::Kind::Text, {}, raw_decode_ ? decode_entities(body) : body, {}, false};
        pos_ = end;
        raw_end_tag_.clear();
        return true;
    }

    bool markup_declaration(Token& tok) {
        std::string_view rest = src_.substr(pos_);
        if (rest.starts_with("<!--")) {
            std::size_t end = src_.find("-->", pos_ + 4);
            std::size_t body_end = end == std::string_view::npos ? src_.size() : end;
            tok = Token{Token::Kind::Comment, {}, std::string(src_.substr(pos_ + 4, body_end - pos_ - 4)), {}, false};
            pos_ = end == std::string_view::npos ? src_.size() : end + 3;
            return true;
        }
        if (rest.starts_with("<![CDATA[")) {
            std::size_t end = src_.find("]]>", pos_ + 9);
            std::size_t body_end = end == std::string_view::npos ? src_.size() : end;
            tok = Token{Token::Kind::CData, {}, std::string(src_.substr(pos_ + 9, body_end - pos_ - 9)), {}, false};
            pos_ = end == std::string_view::npos ? src_.size() : end + 3;
            return true;
        }
        if (text::starts_with_icase(rest, "<!doctype")) {
            std::size_t end = src_.find('>', pos_);
            std::size_t body_end = end == std::string_view::npos ? src_.size() : end;
            tok = Token{Token::Kind::Doctype, {}, std::string(src_.substr(pos_ + 2, body_end - pos_ - 2)), {}, false};
            pos_ = end == std::string_view::npos ? src_.size() : end + 1;
            return true;
        }
        return bogus_comment(tok, pos_ + 2);
    }

    bool bogus_comment(Token& tok, std::size_t body_start) {
        std::size_t end = src_.find('>', body_start);
        std::size_t body_end = end == std::string_view::npos ? src_.size() : end;
        tok = Token{Token::Kind::Comment, {}, std::string(src_.substr(body_start, body_end - body_start)), {}, false};
        pos_ = end == std::string_view::npos ? src_.size() : end + 1;
        return true;
    }

    std::string read_name() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && !text::is_space(src_[pos_]) && src_[pos_] != '>' && src_[pos_] != '/') ++pos_;
        return text::to_lower_ascii(src_.substr(start, pos_ - start));
    }

    void skip_space() {
        while (pos_ < src_.size() && text::is_space(src_[pos_])) ++pos_;
    }

    bool end_tag(Token& tok) {
        pos_ += 2;
        tok = Token{Token::Kind::EndTag, read_name(), {}, {}, false};
        std::size_t end = src_.find('>', pos_);
        pos_ = end == std::string_view::npos ? src_.size() : end + 1;
        return true;
    }

    bool start_tag(Token& tok) {
        ++pos_;
        tok = Token{Token::Kind::StartTag, read_name(), {}, {}, false};
        while (pos_ < src_.size()) {
            skip_space();
            if (pos_ >= src_.size()) break;
            char c = src_[pos_];
            if (c == '>') {
                ++pos_;
                break;
            }
            if (c == '/') {
                ++pos_;
                if (pos_ < src_.size() && src_[pos_] == '>') {
                    tok.self_closing = true;
                    ++pos_;
                    break;
                }
                continue;
            }
            std::size_t name_start = pos_;
            while (pos_ < src_.size() && !text::is_space(src_[pos_]) && src_[pos_] != '>' && src_[pos_] != '=' &&
                   !(src_[pos_] == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>')) {
                ++pos_;
            }
            if (pos_ == name_start) {
                ++pos_;
                continue;
            }
            std::string attr_name = text::to_lower_ascii(src_.substr(name_start, pos_ - name_start));
            std::string value;
            skip_space();
            if (pos_ < src_.size() && src_[pos_] == '=') {
                ++pos_;
                skip_space();
                if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
                    char quote = src_[pos_++];
                    std::size_t end = src_.find(quote, pos_);
                    if (end == std::string_view::npos) end = src_.size();
                    value = decode_entities(src_.substr(pos_, end - pos_));
                    pos_ = std::min(end + 1, src_.size());
                } else {
                    std::size_t start = pos_;
                    while (pos_ < src_.size() && !text::is_space(src_[pos_]) && src_[pos_] != '>') ++pos_;
                    value = decode_entities(src_.substr(start, pos_ - start));
                }
            }
            bool duplicate = std::any_of(tok.attributes.begin(), tok.attributes.end(),
                                         [&](const Attribute& a) { return a.name == attr_name; });
            if (!duplicate) tok.attributes.push_back({std::move(attr_name), std::move(value)});
        }
        if (!tok.self_closing) {
            if (is_raw_text_element(tok.name)) {
                raw_end_tag_ = tok.name;
                raw_decode_ = false;
            } else if (tok.name == "textarea" || tok.name == "title") {
                raw_end_tag_ = tok.name;
                raw_decode_ = true;
            }
        }
        return true;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::string raw_end_tag_;
    bool raw_decode_ = false;
};

bool in_list(std::string_view tag, std::initializer_list<std::string_view> list) {
    return std::find(list.begin(), list.end(), tag) != list.end();
}

bool closes_paragraph(std::string_view tag) {
    return in_list(tag, {"address", "article", "aside", "blockquote", "details", "div", "dl", "fieldset",
                         "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6",
                         "header", "hr", "main", "menu", "nav", "ol", "p", "pre", "section", "table", "ul",
                         "li", "dd", "dt"});
}

class TreeBuilder {
public:
    TreeBuilder() { stack_.push_back(&doc_.root()); }

    void feed(Token&& tok) {
        switch (tok.kind) {
        case Token::Kind::Text:
            if (!tok.data.empty()) append_text(std::move(tok.data));
            break;
        case Token::Kind::Comment:
            current().append(std::make_unique<Node>(NodeKind::Comment, std::string{}, std::move(tok.data)));
            break;
        case Token::Kind::CData:
            current().append(std::make_unique<Node>(NodeKind::CData, std::string{}, std::move(tok.data)));
            break;
        case Token::Kind::Doctype:
            current().append(std::make_unique<Node>(NodeKind::Doctype, std::string{}, std::move(tok.data)));
            break;
        case Token::Kind::StartTag: start(std::move(tok)); break;
        case Token::Kind::EndTag: end(tok.name); break;
        }
    }

    Document finish() && { return std::move(doc_); }

private:
    Node& current() { return *stack_.back(); }

    void append_text(std::string data) {
        auto& kids = current().mutable_children();
        if (!kids.empty() && kids.back()->is_text()) {
            kids.back()->data() += data;
            return;
        }
        current().append(std::make_unique<Node>(NodeKind::Text, std::string{}, std::move(data)));
    }

    // Index of the innermost open `tag`, searching down to (not past) a boundary.
    std::ptrdiff_t find_open(std::initializer_list<std::string_view> tags,
                             std::initializer_list<std::string_view> boundaries) const {
        for (auto i = static_cast<std::ptrdiff_t>(stack_.size()) - 1; i > 0; --i) {
            const auto& name = stack_[static_cast<std::size_t>(i)]->name();
            if (in_list(name, tags)) return i;
            if (in_list(name, boundaries)) return -1;
        }
        return -1;
    }

    void pop_to(std::ptrdiff_t index) {
        if (index > 0) stack_.resize(static_cast<std::size_t>(index));
    }

    void start(Token&& tok) {
        const std::string& tag = tok.name;
        if (closes_paragraph(tag)) {
            pop_to(find_open({"p"}, {"button", "table", "td", "th", "caption", "html", "body", "template"}));
        }
        if (tag == "li") {
            pop_to(find_open({"li"}, {"ul", "ol", "menu", "table", "td", "th"}));
        } else if (tag == "dt" || tag == "dd") {
            pop_to(find_open({"dt", "dd"}, {"dl", "table", "td", "th"}));
        } else if (tag == "tr") {
            pop_to(find_open({"tr"}, {"table", "tbody", "thead", "tfoot"}));
        } else if (tag == "td" || tag == "th") {
            pop_to(find_open({"td", "th"}, {"tr", "table"}));
        } else if (tag == "tbody" || tag == "thead" || tag == "tfoot") {
            pop_to(find_open({"tbody", "thead", "tfoot"}, {"table"}));
        } else if (tag == "option") {
            pop_to(find_open({"option"}, {"select", "datalist", "optgroup"}));
        } else if (tag == "optgroup") {
            auto group = find_open({"optgroup"}, {"select"});
            pop_to(group >= 0 ? group : find_open({"option"}, {"select"}));
        }
        auto node = std::make_unique<Node>(NodeKind::Element, tok.name);
        node->attributes() = std::move(tok.attributes);
        Node& added = current().append(std::move(node));
        if (!tok.self_closing && !is_void_element(added.name())) stack_.push_back(&added);
    }

    void end(const std::string& tag) {
        for (auto i = static_cast<std::ptrdiff_t>(stack_.size()) - 1; i > 0; --i) {
            if (stack_[static_cast<std::size_t>(i)]->name() == tag) {
                pop_to(i);
                return;
            }
        }
    }

    Document doc_;
    std::vector<Node*> stack_;
};

} // namespace

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(s[i++]);
            continue;
        }
        std::string_view body = s.substr(i + 1, semi - i - 1);
        bool decoded = false;
        if (body.size() >= 2 && body[0] == '#') {
            std::uint32_t cp = 0;
            bool hex = body[1] == 'x' || body[1] == 'X';
            std::string_view digits = body.substr(hex ? 2 : 1);
            bool ok = !digits.empty();
            for (char c : digits) {
                int d = -1;
                if (is_digit(c)) d = c - '0';
                else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
                if (d < 0 || cp > 0x10FFFF) {
                    ok = false;
                    break;
                }
                cp = cp * (hex ? 16u : 10u) + static_cast<std::uint32_t>(d);
            }
            if (ok) {
                append_utf8(out, static_cast<char32_t>(cp));
                decoded = true;
            }
        } else {
            for (const auto& e : kEntities) {
                if (e.name == body) {
                    append_utf8(out, e.codepoint);
                    decoded = true;
                    break;
                }
            }
        }
        if (decoded) {
            i = semi + 1;
        } else {
            out.push_back(s[i++]);
        }
    }
    return out;
}

Document parse(std::string_view html) {
    Tokenizer tokenizer(html);
    TreeBuilder builder;
    Token tok{Token::Kind::Text, {}, {}, {}, false};
    while (tokenizer.next(tok)) builder.feed(std::move(tok));
    return std::move(builder).finish();
}

} // namespace shopx::html
