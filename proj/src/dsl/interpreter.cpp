#include "shopx/dsl/interpreter.hpp"

#include <regex>
#include <unordered_map>

#include "shopx/common/text.hpp"
#include "shopx/css/selector.hpp"

namespace shopx::dsl {

std::string_view to_string(FieldStatus s) noexcept {
    switch (s) {
    case FieldStatus::Extracted: return "extracted";
    case FieldStatus::NoMatch: return "no_match";
    case FieldStatus::PostOpFailed: return "post_op_failed";
    }
    return "";
}

namespace {

// Per-thread caches; programs are immutable so patterns can be shared freely.
const css::Selector& cached_selector(const std::string& source) {
    thread_local std::unordered_map<std::string, css::Selector> cache;
    auto it = cache.find(source);
    if (it == cache.end()) {
        if (cache.size() > 4096) cache.clear();
        it = cache.emplace(source, css::Selector::parse(source)).first;
    }
    return it->second;
}

const std::regex& cached_regex(const std::string& pattern) {
    thread_local std::unordered_map<std::string, std::regex> cache;
    auto it = cache.find(pattern);
    if (it == cache.end()) {
        if (cache.size() > 4096) cache.clear();
        it = cache.emplace(pattern, std::regex(pattern, std::regex::ECMAScript)).first;
    }
    return it->second;
}

std::optional<std::string> apply(const PostOp& op, std::string s) {
    switch (op.kind) {
    case PostOpKind::Trim: return std::string(text::trim(s));
    case PostOpKind::StripLabelPrefix: {
        const auto& prefixes = op.prefixes.empty() ? schema::ingredient_label_prefixes() : op.prefixes;
        for (const auto& p : prefixes) {
            if (text::starts_with_icase(s, p)) return std::string(text::trim(std::string_view(s).substr(p.size())));
        }
        return s;
    }
    case PostOpKind::ParseDecimalComma: {
        auto v = text::parse_decimal(s);
        if (!v) return std::nullopt;
        return text::format_decimal(*v);
    }
    case PostOpKind::ToUnitCode: {
        std::string key(text::trim(s));
        for (const auto& [from, to] : op.unit_map) {
            if (text::iequals(from, key)) return to;
        }
        if (schema::is_known_unit_code(key)) return key;
        if (op.unit_default) return *op.unit_default;
        return std::nullopt;
    }
    }
    return std::nullopt;
}

struct RuleOutcome {
    FieldStatus status = FieldStatus::NoMatch;
    std::string value;
};

RuleOutcome run_rule(const FieldRule& rule, const html::Node& root, const InterpreterLimits& limits) {
    std::vector<const html::Node*> nodes;
    try {
        nodes = cached_selector(rule.selector).select(root, limits.max_selector_matches);
    } catch (const css::InvalidSelector&) {
        return {FieldStatus::NoMatch, {}};
    }
    std::size_t index = static_cast<std::size_t>(rule.node_index.value_or(0));
    if (index >= nodes.size()) return {FieldStatus::NoMatch, {}};
    std::string s = text::collapse_whitespace(html::text_content(*nodes[index]));
    try {
        if (rule.capture) {
            std::smatch m;
            if (!std::regex_search(s, m, cached_regex(*rule.capture)) || m.size() < 2 || !m[1].matched) {
                return {FieldStatus::NoMatch, {}};
            }
            s = m[1].str();
        }
    } catch (const std::regex_error&) {
        return {FieldStatus::PostOpFailed, {}};
    }
    for (const auto& op : rule.post_ops) {
        auto next = apply(op, std::move(s));
        if (!next) return {FieldStatus::PostOpFailed, {}};
        s = std::move(*next);
    }
    if (text::trim(s).empty()) return {FieldStatus::PostOpFailed, {}};
    return {FieldStatus::Extracted, std::move(s)};
}

} // namespace

ExtractionResult run_extraction(const ExtractionProgram& prog, const html::Document& dom,
                                const InterpreterLimits& limits) {
    ExtractionResult out;
    std::map<std::string, std::string> values;
    for (const auto& rule : prog.rules) {
        RuleOutcome r = run_rule(rule, dom.root(), limits);
        if (r.status == FieldStatus::Extracted && rule.field_path.ends_with(".value") &&
            !text::parse_decimal(text::trim(r.value))) {
            r.status = FieldStatus::PostOpFailed;
        }
        out.field_status[rule.field_path] = r.status;
        if (r.status == FieldStatus::Extracted) values[rule.field_path] = std::move(r.value);
    }
    if (auto it = values.find("ingredient_statement"); it != values.end()) {
        out.product.ingredient_statement = it->second;
    }
    for (auto f : schema::kNutrientFields) {
        const std::string name(schema::field_name(f));
        auto v = values.find(name + ".value");
        if (v == values.end()) continue;
        schema::QuantitativeValue qv{*text::parse_decimal(text::trim(v->second)), std::nullopt};
        if (auto u = values.find(name + ".unit_code"); u != values.end()) qv.unit_code = std::string(text::trim(u->second));
        schema::nutrient(out.product, f) = qv;
    }
    return out;
}

ExtractionResult run_extraction(const ExtractionProgram& prog, const html::CompressedDocument& doc,
                                const InterpreterLimits& limits) {
    if (doc.variant != html::Variant::HtmlCompressed) {
        throw html::WrongVariant("extraction programs run on HTML_COMPRESSED content");
    }
    return run_extraction(prog, html::parse(doc.content), limits);
}

namespace {

bool eval_folded(const Predicate& p, const std::string& raw, const std::string& folded) {
    switch (p.op) {
    case Predicate::Op::And:
        for (const auto& a : p.args) {
            if (!eval_folded(a, raw, folded)) return false;
        }
        return true;
    case Predicate::Op::Or:
        for (const auto& a : p.args) {
            if (eval_folded(a, raw, folded)) return true;
        }
        return false;
    case Predicate::Op::Not: return !eval_folded(p.args.at(0), raw, folded);
    case Predicate::Op::ContainsKeyword: return folded.find(text::casefold(p.argument)) != std::string::npos;
    case Predicate::Op::MatchesRegex:
        try {
            return std::regex_search(raw, cached_regex(p.argument));
        } catch (const std::regex_error&) {
            return false;
        }
    }
    return false;
}

} // namespace

bool evaluate(const Predicate& p, std::string_view text) {
    std::string raw(text);
    return eval_folded(p, raw, text::casefold(raw));
}

bool run_decision(const DecisionProgram& prog, const html::CompressedDocument& doc) {
    if (doc.variant != html::Variant::Text) throw html::WrongVariant("decision programs run on TEXT content");
    return evaluate(prog.predicate, doc.content);
}

int count_extracted(const schema::FoodProduct& product) { return schema::populated_count(product); }

} // namespace shopx::dsl
