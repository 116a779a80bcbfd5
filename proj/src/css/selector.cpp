#include "shopx/css/selector.hpp"

#include <optional>

#include "shopx/common/text.hpp"

namespace shopx::css {

namespace detail {

enum class AttrOp { Exists, Equals, Includes, DashMatch, Prefix, Suffix, Substring };

struct Compound;

struct Simple {
    enum class Kind { Type, Id, Class, Attribute, FirstChild, LastChild, OnlyChild, NthChild, NthOfType, Contains, Not };
    Kind kind = Kind::Type;
    std::string name;
    std::string value;
    AttrOp op = AttrOp::Exists;
    long a = 0;
    long b = 0;
    std::shared_ptr<Compound> negated;
};

struct Compound {
    std::vector<Simple> simples; // empty == universal
};

enum class Combinator { None, Descendant, Child, Adjacent, Sibling };

struct Step {
    Combinator combinator = Combinator::None; // relation to the previous step
    Compound compound;
};

struct Complex {
    std::vector<Step> steps;
};

struct SelectorList {
    std::vector<Complex> alternatives;
};

} // namespace detail

namespace {

using namespace detail;

bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    SelectorList parse_list() {
        SelectorList list;
        skip_space();
        if (at_end()) fail("empty selector");
        while (true) {
            list.alternatives.push_back(parse_complex());
            skip_space();
            if (at_end()) break;
            if (peek() != ',') fail("unexpected character");
            ++pos_;
            skip_space();
            if (at_end()) fail("dangling comma");
        }
        return list;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw InvalidSelector("invalid selector '" + std::string(src_) + "': " + why + " at offset " +
                              std::to_string(pos_));
    }

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }

    bool skip_space() {
        std::size_t start = pos_;
        while (!at_end() && text::is_space(peek())) ++pos_;
        return pos_ != start;
    }

    Complex parse_complex() {
        Complex complex;
        complex.steps.push_back({Combinator::None, parse_compound()});
        while (true) {
            bool space = skip_space();
            if (at_end() || peek() == ',' || peek() == ')') break;
            Combinator comb = Combinator::Descendant;
            if (peek() == '>' || peek() == '+' || peek() == '~') {
                comb = peek() == '>' ? Combinator::Child : peek() == '+' ? Combinator::Adjacent : Combinator::Sibling;
                ++pos_;
                skip_space();
                if (at_end()) fail("dangling combinator");
            } else if (!space) {
                fail("unexpected character");
            }
            complex.steps.push_back({comb, parse_compound()});
        }
        return complex;
    }

    std::string parse_ident() {
        std::string out;
        while (!at_end()) {
            char c = peek();
            if (c == '\\' && pos_ + 1 < src_.size()) {
                out.push_back(src_[pos_ + 1]);
                pos_ += 2;
            } else if (is_ident_char(c)) {
                out.push_back(c);
                ++pos_;
            } else {
                break;
            }
        }
        return out;
    }

    std::string parse_string_or_ident() {
        if (!at_end() && (peek() == '"' || peek() == '\'')) {
            char quote = peek();
            ++pos_;
            std::string out;
            while (!at_end() && peek() != quote) {
                if (peek() == '\\' && pos_ + 1 < src_.size()) ++pos_;
                out.push_back(peek());
                ++pos_;
            }
            if (at_end()) fail("unterminated string");
            ++pos_;
            return out;
        }
        std::string ident = parse_ident();
        if (ident.empty()) fail("expected string or identifier");
        return ident;
    }

    Compound parse_compound() {
        Compound compound;
        bool any = false;
        if (!at_end() && peek() == '*') {
            ++pos_;
            any = true;
        } else if (!at_end() && is_ident_char(peek())) {
            Simple s;
            s.kind = Simple::Kind::Type;
            s.name = text::to_lower_ascii(parse_ident());
            compound.simples.push_back(std::move(s));
            any = true;
        }
        while (!at_end()) {
            char c = peek();
            if (c == '#' || c == '.') {
                ++pos_;
                Simple s;
                s.kind = c == '#' ? Simple::Kind::Id : Simple::Kind::Class;
                s.name = parse_ident();
                if (s.name.empty()) fail("expected name");
                compound.simples.push_back(std::move(s));
            } else if (c == '[') {
                compound.simples.push_back(parse_attribute());
            } else if (c == ':') {
                compound.simples.push_back(parse_pseudo());
            } else {
                break;
            }
            any = true;
        }
        if (!any) fail("expected selector");
        return compound;
    }

    Simple parse_attribute() {
        ++pos_;
        skip_space();
        Simple s;
        s.kind = Simple::Kind::Attribute;
        s.name = text::to_lower_ascii(parse_ident());
        if (s.name.empty()) fail("expected attribute name");
        skip_space();
        if (at_end()) fail("unterminated attribute selector");
        if (peek() != ']') {
            char c = peek();
            if (c == '=') {
                s.op = AttrOp::Equals;
                ++pos_;
            } else {
                if (pos_ + 1 >= src_.size() || src_[pos_ + 1] != '=') fail("bad attribute operator");
                switch (c) {
                case '~': s.op = AttrOp::Includes; break;
                case '|': s.op = AttrOp::DashMatch; break;
                case '^': s.op = AttrOp::Prefix; break;
                case '$': s.op = AttrOp::Suffix; break;
                case '*': s.op = AttrOp::Substring; break;
                default: fail("bad attribute operator");
                }
                pos_ += 2;
            }
            skip_space();
            s.value = parse_string_or_ident();
            skip_space();
        }
        if (at_end() || peek() != ']') fail("unterminated attribute selector");
        ++pos_;
        return s;
    }

    // Parses an+b, odd, even or an integer inside parentheses.
    void parse_nth(Simple& s) {
        skip_space();
        std::size_t close = src_.find(')', pos_);
        if (close == std::string_view::npos) fail("unterminated :nth argument");
        std::string arg;
        for (char c : src_.substr(pos_, close - pos_)) {
            if (!text::is_space(c)) arg.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
        }
        pos_ = close + 1;
        if (arg == "odd") {
            s.a = 2;
            s.b = 1;
            return;
        }
        if (arg == "even") {
            s.a = 2;
            s.b = 0;
            return;
        }
        auto parse_int = [&](std::string_view t, long& out) {
            if (t.empty()) return false;
            std::size_t i = 0;
            bool neg = false;
            if (t[0] == '+' || t[0] == '-') {
                neg = t[0] == '-';
                i = 1;
            }
            if (i >= t.size()) return false;
            long v = 0;
            for (; i < t.size(); ++i) {
                if (t[i] < '0' || t[i] > '9') return false;
                v = v * 10 + (t[i] - '0');
                if (v > 1'000'000) return false;
            }
            out = neg ? -v : v;
            return true;
        };
        std::size_t n = arg.find('n');
        if (n == std::string::npos) {
            s.a = 0;
            if (!parse_int(arg, s.b)) fail("bad :nth argument");
            return;
        }
        std::string a_part = arg.substr(0, n);
        if (a_part.empty() || a_part == "+") s.a = 1;
        else if (a_part == "-") s.a = -1;
        else if (!parse_int(a_part, s.a)) fail("bad :nth argument");
        std::string b_part = arg.substr(n + 1);
        s.b = 0;
        if (!b_part.empty() && (!(b_part[0] == '+' || b_part[0] == '-') || !parse_int(b_part, s.b))) {
            fail("bad :nth argument");
        }
    }

    Simple parse_pseudo() {
        ++pos_;
        std::string name = text::to_lower_ascii(parse_ident());
        Simple s;
        if (name == "first-child") {
            s.kind = Simple::Kind::FirstChild;
        } else if (name == "last-child") {
            s.kind = Simple::Kind::LastChild;
        } else if (name == "only-child") {
            s.kind = Simple::Kind::OnlyChild;
        } else if (name == "nth-child" || name == "nth-of-type") {
            s.kind = name == "nth-child" ? Simple::Kind::NthChild : Simple::Kind::NthOfType;
            expect('(');
            parse_nth(s);
        } else if (name == "contains") {
            s.kind = Simple::Kind::Contains;
            expect('(');
            skip_space();
            s.value = text::collapse_whitespace(parse_string_or_ident());
            skip_space();
            expect(')');
        } else if (name == "not") {
            s.kind = Simple::Kind::Not;
            expect('(');
            skip_space();
            s.negated = std::make_shared<Compound>(parse_compound());
            skip_space();
            expect(')');
        } else {
            fail("unsupported pseudo-class ':" + name + "'");
        }
        return s;
    }

    void expect(char c) {
        if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

bool nth_matches(long a, long b, long position) {
    // position is 1-based; matches iff position == a*n + b for some n >= 0.
    if (a == 0) return position == b;
    long diff = position - b;
    if (diff % a != 0) return false;
    return diff / a >= 0;
}

bool attribute_matches(const Simple& s, const html::Node& el) {
    const std::string* v = el.attribute(s.name);
    if (v == nullptr) return false;
    std::string_view value = *v;
    switch (s.op) {
    case AttrOp::Exists: return true;
    case AttrOp::Equals: return value == s.value;
    case AttrOp::Includes: {
        if (s.value.empty()) return false;
        std::size_t i = 0;
        while (i < value.size()) {
            while (i < value.size() && text::is_space(value[i])) ++i;
            std::size_t j = i;
            while (j < value.size() && !text::is_space(value[j])) ++j;
            if (j > i && value.substr(i, j - i) == s.value) return true;
            i = j;
        }
        return false;
    }
    case AttrOp::DashMatch:
        return value == s.value || (value.size() > s.value.size() && value.starts_with(s.value) &&
                                    value[s.value.size()] == '-');
    case AttrOp::Prefix: return !s.value.empty() && value.starts_with(s.value);
    case AttrOp::Suffix: return !s.value.empty() && value.ends_with(s.value);
    case AttrOp::Substring: return !s.value.empty() && value.find(s.value) != std::string_view::npos;
    }
    return false;
}

bool compound_matches(const Compound& compound, const html::Node& el);

bool simple_matches(const Simple& s, const html::Node& el) {
    using K = Simple::Kind;
    switch (s.kind) {
    case K::Type: return el.name() == s.name;
    case K::Id: {
        const std::string* id = el.attribute("id");
        return id != nullptr && *id == s.name;
    }
    case K::Class: return el.has_class(s.name);
    case K::Attribute: return attribute_matches(s, el);
    case K::FirstChild: return el.parent() != nullptr && el.element_index() == 0;
    case K::LastChild:
    case K::OnlyChild: {
        if (el.parent() == nullptr) return false;
        std::size_t total = 0;
        for (const auto& c : el.parent()->children()) total += c->is_element() ? 1 : 0;
        if (s.kind == K::OnlyChild) return total == 1;
        return el.element_index() + 1 == total;
    }
    case K::NthChild:
        return el.parent() != nullptr && nth_matches(s.a, s.b, static_cast<long>(el.element_index()) + 1);
    case K::NthOfType: {
        if (el.parent() == nullptr) return false;
        long position = 0;
        for (const auto& c : el.parent()->children()) {
            if (c->is_element() && c->name() == el.name()) ++position;
            if (c.get() == &el) break;
        }
        return nth_matches(s.a, s.b, position);
    }
    case K::Contains:
        return text::collapse_whitespace(html::text_content(el)).find(s.value) != std::string::npos;
    case K::Not: return !compound_matches(*s.negated, el);
    }
    return false;
}

bool compound_matches(const Compound& compound, const html::Node& el) {
    if (!el.is_element()) return false;
    for (const auto& s : compound.simples) {
        if (!simple_matches(s, el)) return false;
    }
    return true;
}

bool matches_from(const Complex& complex, std::size_t index, const html::Node& el) {
    const Step& step = complex.steps[index];
    if (!compound_matches(step.compound, el)) return false;
    if (index == 0) return true;
    switch (step.combinator) {
    case Combinator::None: return true;
    case Combinator::Child: {
        const html::Node* p = el.parent();
        return p != nullptr && p->is_element() && matches_from(complex, index - 1, *p);
    }
    case Combinator::Descendant:
        for (const html::Node* p = el.parent(); p != nullptr && p->is_element(); p = p->parent()) {
            if (matches_from(complex, index - 1, *p)) return true;
        }
        return false;
    case Combinator::Adjacent: {
        const html::Node* prev = el.previous_element_sibling();
        return prev != nullptr && matches_from(complex, index - 1, *prev);
    }
    case Combinator::Sibling:
        for (const html::Node* prev = el.previous_element_sibling(); prev != nullptr;
             prev = prev->previous_element_sibling()) {
            if (matches_from(complex, index - 1, *prev)) return true;
        }
        return false;
    }
    return false;
}

void collect(const SelectorList& list, const html::Node& node, std::size_t limit,
             std::vector<const html::Node*>& out) {
    for (const auto& child : node.children()) {
        if (out.size() >= limit) return;
        if (!child->is_element()) continue;
        for (const auto& complex : list.alternatives) {
            if (matches_from(complex, complex.steps.size() - 1, *child)) {
                out.push_back(child.get());
                break;
            }
        }
        collect(list, *child, limit, out);
    }
}

} // namespace

Selector Selector::parse(std::string_view source) {
    Parser parser(source);
    Selector sel;
    sel.source_ = std::string(source);
    sel.list_ = std::make_shared<const SelectorList>(parser.parse_list());
    return sel;
}

bool Selector::matches(const html::Node& element) const {
    if (!element.is_element() || !list_) return false;
    for (const auto& complex : list_->alternatives) {
        if (matches_from(complex, complex.steps.size() - 1, element)) return true;
    }
    return false;
}

std::vector<const html::Node*> Selector::select(const html::Node& root, std::size_t limit) const {
    std::vector<const html::Node*> out;
    if (list_) collect(*list_, root, limit, out);
    return out;
}

} // namespace shopx::css
