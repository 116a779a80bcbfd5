#include "shopx/dsl/program.hpp"

#include <regex>
#include <set>

#include "shopx/css/selector.hpp"

namespace shopx::dsl {

using nlohmann::json;

std::string_view to_string(PostOpKind k) noexcept {
    switch (k) {
    case PostOpKind::Trim: return "trim";
    case PostOpKind::StripLabelPrefix: return "strip_label_prefix";
    case PostOpKind::ParseDecimalComma: return "parse_decimal_comma";
    case PostOpKind::ToUnitCode: return "to_unit_code";
    }
    return "";
}

std::string_view to_string(IssueKind k) noexcept {
    switch (k) {
    case IssueKind::Malformed: return "Malformed";
    case IssueKind::InvalidSelector: return "InvalidSelector";
    case IssueKind::InvalidRegex: return "InvalidRegex";
    case IssueKind::UnknownField: return "UnknownField";
    case IssueKind::UnknownPostOp: return "UnknownPostOp";
    case IssueKind::InapplicablePostOp: return "InapplicablePostOp";
    case IssueKind::DuplicateRule: return "DuplicateRule";
    case IssueKind::TooDeep: return "TooDeep";
    }
    return "";
}

std::string render_issues(const std::vector<ProgramIssue>& issues) {
    std::string out;
    for (const auto& i : issues) {
        if (!out.empty()) out += '\n';
        out += "- " + (i.path.empty() ? std::string("<program>") : i.path) + ": " + std::string(to_string(i.kind)) +
               ", " + i.message;
    }
    return out;
}

ProgramError::ProgramError(std::vector<ProgramIssue> issues)
    : Error("invalid program:\n" + render_issues(issues)), issues_(std::move(issues)) {}

const FieldRule* ExtractionProgram::rule_for(std::string_view field_path) const {
    for (const auto& r : rules) {
        if (r.field_path == field_path) return &r;
    }
    return nullptr;
}

Predicate Predicate::keyword(std::string k) { return Predicate{Op::ContainsKeyword, std::move(k), {}}; }
Predicate Predicate::regex(std::string pattern) { return Predicate{Op::MatchesRegex, std::move(pattern), {}}; }
Predicate Predicate::all(std::vector<Predicate> xs) { return Predicate{Op::And, {}, std::move(xs)}; }
Predicate Predicate::any(std::vector<Predicate> xs) { return Predicate{Op::Or, {}, std::move(xs)}; }
Predicate Predicate::negate(Predicate x) { return Predicate{Op::Not, {}, {std::move(x)}}; }

int Predicate::depth() const {
    int d = 0;
    for (const auto& a : args) d = std::max(d, a.depth());
    return d + 1;
}

namespace {

enum class Slot { String, Value, Unit };

std::optional<Slot> slot_of(std::string_view path, const schema::SchemaDescriptor& desc) {
    auto dot = path.find('.');
    const schema::FieldDescriptor* f = desc.find(path.substr(0, dot));
    if (f == nullptr) return std::nullopt;
    if (f->type == schema::SemanticType::String) {
        if (dot != std::string_view::npos) return std::nullopt;
        return Slot::String;
    }
    if (dot == std::string_view::npos) return std::nullopt;
    std::string_view sub = path.substr(dot + 1);
    if (sub == "value") return Slot::Value;
    if (sub == "unit_code") return Slot::Unit;
    return std::nullopt;
}

bool compiles(const std::string& pattern, bool need_group, std::string& why) {
    try {
        std::regex re(pattern, std::regex::ECMAScript);
        if (need_group && re.mark_count() < 1) {
            why = "needs one capture group";
            return false;
        }
        return true;
    } catch (const std::regex_error& e) {
        why = e.what();
        return false;
    }
}

class Checker {
public:
    std::vector<ProgramIssue> issues;

    void add(std::string path, IssueKind kind, std::string message) {
        issues.push_back({std::move(path), kind, std::move(message)});
    }

    std::optional<std::string> string_member(const json& obj, const char* key, const std::string& path, bool required,
                                             bool non_empty = true) {
        if (!obj.contains(key)) {
            if (required) add(path + "." + key, IssueKind::Malformed, "missing");
            return std::nullopt;
        }
        const json& v = obj[key];
        if (!v.is_string() || (non_empty && v.get<std::string>().empty())) {
            add(path + "." + key, IssueKind::Malformed, non_empty ? "expected a non-empty string" : "expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    void unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
        for (const auto& [key, v] : obj.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) add(path + "." + key, IssueKind::Malformed, "unknown member");
        }
    }

    std::optional<PostOp> post_op(const json& j, const std::string& path, std::optional<Slot> slot) {
        if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) {
            add(path, IssueKind::Malformed, "expected an object with an \"op\" string");
            return std::nullopt;
        }
        const std::string name = j["op"].get<std::string>();
        PostOp op;
        std::optional<Slot> wanted;
        if (name == "trim") {
            op.kind = PostOpKind::Trim;
            unknown_keys(j, {"op"}, path);
        } else if (name == "strip_label_prefix") {
            op.kind = PostOpKind::StripLabelPrefix;
            wanted = Slot::String;
            unknown_keys(j, {"op", "prefixes"}, path);
            if (j.contains("prefixes")) {
                if (!j["prefixes"].is_array()) {
                    add(path + ".prefixes", IssueKind::Malformed, "expected an array of strings");
                } else {
                    for (const auto& p : j["prefixes"]) {
                        if (!p.is_string() || p.get<std::string>().empty()) {
                            add(path + ".prefixes", IssueKind::Malformed, "expected non-empty strings");
                            break;
                        }
                        op.prefixes.push_back(p.get<std::string>());
                    }
                }
            }
        } else if (name == "parse_decimal_comma") {
            op.kind = PostOpKind::ParseDecimalComma;
            wanted = Slot::Value;
            unknown_keys(j, {"op"}, path);
        } else if (name == "to_unit_code") {
            op.kind = PostOpKind::ToUnitCode;
            wanted = Slot::Unit;
            unknown_keys(j, {"op", "map", "default"}, path);
            if (j.contains("map")) {
                if (!j["map"].is_object()) {
                    add(path + ".map", IssueKind::Malformed, "expected an object of strings");
                } else {
                    for (const auto& [k, v] : j["map"].items()) {
                        if (!v.is_string() || v.get<std::string>().empty()) {
                            add(path + ".map." + k, IssueKind::Malformed, "expected a non-empty string");
                            continue;
                        }
                        op.unit_map[k] = v.get<std::string>();
                    }
                }
            }
            op.unit_default = string_member(j, "default", path, false);
        } else {
            add(path + ".op", IssueKind::UnknownPostOp, "unknown post operation '" + name + "'");
            return std::nullopt;
        }
        if (wanted && slot && *wanted != *slot) {
            add(path, IssueKind::InapplicablePostOp, name + " does not apply to this field");
        }
        return op;
    }

    std::optional<FieldRule> rule(const json& j, const std::string& path, const schema::SchemaDescriptor& desc) {
        if (!j.is_object()) {
            add(path, IssueKind::Malformed, "expected an object");
            return std::nullopt;
        }
        unknown_keys(j, {"field", "selector", "node_index", "capture", "post_ops"}, path);
        FieldRule r;
        std::size_t before = issues.size();
        auto field = string_member(j, "field", path, true);
        std::optional<Slot> slot;
        if (field) {
            r.field_path = *field;
            slot = slot_of(*field, desc);
            if (!slot) add(path + ".field", IssueKind::UnknownField, "unknown field path '" + *field + "'");
        }
        if (auto sel = string_member(j, "selector", path, true)) {
            r.selector = *sel;
            try {
                css::Selector::parse(*sel);
            } catch (const css::InvalidSelector& e) {
                add(path + ".selector", IssueKind::InvalidSelector, e.what());
            }
        }
        if (j.contains("node_index")) {
            const json& v = j["node_index"];
            if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 1'000'000) {
                add(path + ".node_index", IssueKind::Malformed, "expected a non-negative integer");
            } else {
                r.node_index = static_cast<int>(v.get<long long>());
            }
        }
        if (auto cap = string_member(j, "capture", path, false)) {
            r.capture = *cap;
            std::string why;
            if (!compiles(*cap, true, why)) add(path + ".capture", IssueKind::InvalidRegex, why);
        }
        if (j.contains("post_ops")) {
            if (!j["post_ops"].is_array()) {
                add(path + ".post_ops", IssueKind::Malformed, "expected an array");
            } else {
                for (std::size_t i = 0; i < j["post_ops"].size(); ++i) {
                    auto op = post_op(j["post_ops"][i], path + ".post_ops[" + std::to_string(i) + "]", slot);
                    if (op) r.post_ops.push_back(std::move(*op));
                }
            }
        }
        if (issues.size() != before) return std::nullopt;
        return r;
    }

    std::optional<std::vector<FieldRule>> rules(const json& arr, const std::string& path,
                                                const schema::SchemaDescriptor& desc) {
        if (!arr.is_array()) {
            add(path, IssueKind::Malformed, "expected an array of rules");
            return std::nullopt;
        }
        std::vector<FieldRule> out;
        std::set<std::string> seen;
        std::size_t before = issues.size();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = path + "[" + std::to_string(i) + "]";
            auto r = rule(arr[i], p, desc);
            if (!r) continue;
            if (!seen.insert(r->field_path).second) {
                add(p + ".field", IssueKind::DuplicateRule, "second rule for '" + r->field_path + "'");
                continue;
            }
            out.push_back(std::move(*r));
        }
        if (issues.size() != before) return std::nullopt;
        return out;
    }

    std::optional<Predicate> predicate(const json& j, const std::string& path, int depth) {
        if (depth > kMaxPredicateDepth) {
            add(path, IssueKind::TooDeep, "predicate deeper than " + std::to_string(kMaxPredicateDepth) + " levels");
            return std::nullopt;
        }
        if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) {
            add(path, IssueKind::Malformed, "expected an object with an \"op\" string");
            return std::nullopt;
        }
        const std::string op = j["op"].get<std::string>();
        Predicate p;
        if (op == "and" || op == "or") {
            p.op = op == "and" ? Predicate::Op::And : Predicate::Op::Or;
            unknown_keys(j, {"op", "args"}, path);
            if (!j.contains("args") || !j["args"].is_array() || j["args"].empty()) {
                add(path + ".args", IssueKind::Malformed, "expected a non-empty array");
                return std::nullopt;
            }
            bool ok = true;
            for (std::size_t i = 0; i < j["args"].size(); ++i) {
                auto sub = predicate(j["args"][i], path + ".args[" + std::to_string(i) + "]", depth + 1);
                if (sub) p.args.push_back(std::move(*sub));
                else ok = false;
            }
            if (!ok) return std::nullopt;
        } else if (op == "not") {
            p.op = Predicate::Op::Not;
            unknown_keys(j, {"op", "arg"}, path);
            if (!j.contains("arg")) {
                add(path + ".arg", IssueKind::Malformed, "missing");
                return std::nullopt;
            }
            auto sub = predicate(j["arg"], path + ".arg", depth + 1);
            if (!sub) return std::nullopt;
            p.args.push_back(std::move(*sub));
        } else if (op == "contains_keyword") {
            p.op = Predicate::Op::ContainsKeyword;
            unknown_keys(j, {"op", "keyword"}, path);
            auto k = string_member(j, "keyword", path, true);
            if (!k) return std::nullopt;
            p.argument = *k;
        } else if (op == "matches_regex") {
            p.op = Predicate::Op::MatchesRegex;
            unknown_keys(j, {"op", "pattern"}, path);
            auto pat = string_member(j, "pattern", path, true);
            if (!pat) return std::nullopt;
            std::string why;
            if (!compiles(*pat, false, why)) {
                add(path + ".pattern", IssueKind::InvalidRegex, why);
                return std::nullopt;
            }
            p.argument = *pat;
        } else {
            add(path + ".op", IssueKind::Malformed, "unknown predicate operator '" + op + "'");
            return std::nullopt;
        }
        return p;
    }
};

template <class T>
Parsed<T> finish(Checker& c, std::optional<T> value) {
    Parsed<T> out;
    out.issues = std::move(c.issues);
    if (out.issues.empty()) out.program = std::move(value);
    return out;
}

json post_op_json(const PostOp& op) {
    json j = {{"op", to_string(op.kind)}};
    switch (op.kind) {
    case PostOpKind::StripLabelPrefix:
        if (!op.prefixes.empty()) j["prefixes"] = op.prefixes;
        break;
    case PostOpKind::ToUnitCode:
        j["map"] = op.unit_map;
        if (op.unit_default) j["default"] = *op.unit_default;
        break;
    default: break;
    }
    return j;
}

const char* op_name(Predicate::Op op) {
    switch (op) {
    case Predicate::Op::And: return "and";
    case Predicate::Op::Or: return "or";
    case Predicate::Op::Not: return "not";
    case Predicate::Op::ContainsKeyword: return "contains_keyword";
    case Predicate::Op::MatchesRegex: return "matches_regex";
    }
    return "";
}

} // namespace

Parsed<std::vector<FieldRule>> parse_rules(const json& doc, const schema::SchemaDescriptor& desc) {
    Checker c;
    std::optional<std::vector<FieldRule>> rules;
    if (!doc.is_object() || !doc.contains("rules")) {
        c.add("rules", IssueKind::Malformed, "expected an object with a \"rules\" array");
    } else {
        c.unknown_keys(doc, {"rules"}, "");
        rules = c.rules(doc["rules"], "rules", desc);
    }
    return finish(c, std::move(rules));
}

Parsed<Predicate> parse_predicate_response(const json& doc) {
    Checker c;
    std::optional<Predicate> p;
    if (!doc.is_object() || !doc.contains("predicate")) {
        c.add("predicate", IssueKind::Malformed, "expected an object with a \"predicate\"");
    } else {
        c.unknown_keys(doc, {"predicate"}, "");
        p = c.predicate(doc["predicate"], "predicate", 1);
    }
    return finish(c, std::move(p));
}

Parsed<ExtractionProgram> parse_extraction(const json& doc, const schema::SchemaDescriptor& desc) {
    Checker c;
    std::optional<ExtractionProgram> prog;
    if (!doc.is_object()) {
        c.add("", IssueKind::Malformed, "expected an object");
        return finish(c, std::move(prog));
    }
    c.unknown_keys(doc, {"kind", "program_id", "target_schema", "created_by", "generation", "rules"}, "");
    if (doc.value("kind", std::string("extraction")) != "extraction") c.add("kind", IssueKind::Malformed, "expected \"extraction\"");
    ExtractionProgram p;
    if (auto id = c.string_member(doc, "program_id", "", true)) p.program_id = *id;
    if (auto s = c.string_member(doc, "target_schema", "", false)) p.target_schema_name = *s;
    if (p.target_schema_name != desc.name) {
        c.add("target_schema", IssueKind::Malformed, "program targets '" + p.target_schema_name + "', not '" + desc.name + "'");
    }
    if (auto s = c.string_member(doc, "created_by", "", false, false)) p.created_by = *s;
    if (doc.contains("generation")) {
        if (!doc["generation"].is_number_integer() || doc["generation"].get<long long>() < 0) {
            c.add("generation", IssueKind::Malformed, "expected a non-negative integer");
        } else {
            p.generation = static_cast<int>(doc["generation"].get<long long>());
        }
    }
    if (!doc.contains("rules")) c.add("rules", IssueKind::Malformed, "missing");
    else if (auto rules = c.rules(doc["rules"], "rules", desc)) p.rules = std::move(*rules);
    prog = std::move(p);
    return finish(c, std::move(prog));
}

Parsed<DecisionProgram> parse_decision(const json& doc) {
    Checker c;
    std::optional<DecisionProgram> prog;
    if (!doc.is_object()) {
        c.add("", IssueKind::Malformed, "expected an object");
        return finish(c, std::move(prog));
    }
    c.unknown_keys(doc, {"kind", "program_id", "created_by", "predicate"}, "");
    if (doc.value("kind", std::string("decision")) != "decision") c.add("kind", IssueKind::Malformed, "expected \"decision\"");
    DecisionProgram p;
    if (auto id = c.string_member(doc, "program_id", "", true)) p.program_id = *id;
    if (auto s = c.string_member(doc, "created_by", "", false, false)) p.created_by = *s;
    if (!doc.contains("predicate")) c.add("predicate", IssueKind::Malformed, "missing");
    else if (auto pred = c.predicate(doc["predicate"], "predicate", 1)) p.predicate = std::move(*pred);
    prog = std::move(p);
    return finish(c, std::move(prog));
}

Parsed<Program> parse_program(std::string_view json_text, const schema::SchemaDescriptor& desc) {
    Parsed<Program> out;
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded()) {
        out.issues.push_back({"", IssueKind::Malformed, "not valid JSON"});
        return out;
    }
    std::string kind = doc.is_object() ? doc.value("kind", std::string()) : std::string();
    if (kind == "extraction") {
        auto p = parse_extraction(doc, desc);
        out.issues = std::move(p.issues);
        if (p.program) out.program = std::move(*p.program);
    } else if (kind == "decision") {
        auto p = parse_decision(doc);
        out.issues = std::move(p.issues);
        if (p.program) out.program = std::move(*p.program);
    } else {
        out.issues.push_back({"kind", IssueKind::Malformed, "expected \"extraction\" or \"decision\""});
    }
    return out;
}

Program parse_program_or_throw(std::string_view json_text, const schema::SchemaDescriptor& desc) {
    auto parsed = parse_program(json_text, desc);
    if (parsed.ok()) return std::move(*parsed.program);
    switch (parsed.issues.front().kind) {
    case IssueKind::InvalidSelector: throw InvalidSelector(std::move(parsed.issues));
    case IssueKind::InvalidRegex: throw InvalidRegex(std::move(parsed.issues));
    case IssueKind::UnknownField: throw UnknownField(std::move(parsed.issues));
    case IssueKind::UnknownPostOp: throw UnknownPostOp(std::move(parsed.issues));
    default: throw ProgramError(std::move(parsed.issues));
    }
}

json to_json(const FieldRule& r) {
    json j = {{"field", r.field_path}, {"selector", r.selector}};
    if (r.node_index) j["node_index"] = *r.node_index;
    if (r.capture) j["capture"] = *r.capture;
    json ops = json::array();
    for (const auto& op : r.post_ops) ops.push_back(post_op_json(op));
    j["post_ops"] = std::move(ops);
    return j;
}

json to_json(const Predicate& p) {
    json j = {{"op", op_name(p.op)}};
    switch (p.op) {
    case Predicate::Op::And:
    case Predicate::Op::Or: {
        json args = json::array();
        for (const auto& a : p.args) args.push_back(to_json(a));
        j["args"] = std::move(args);
        break;
    }
    case Predicate::Op::Not: j["arg"] = to_json(p.args.at(0)); break;
    case Predicate::Op::ContainsKeyword: j["keyword"] = p.argument; break;
    case Predicate::Op::MatchesRegex: j["pattern"] = p.argument; break;
    }
    return j;
}

json rules_to_json(const std::vector<FieldRule>& rules) {
    json arr = json::array();
    for (const auto& r : rules) arr.push_back(to_json(r));
    return arr;
}

json to_json(const ExtractionProgram& p) {
    return {{"kind", "extraction"},
            {"program_id", p.program_id},
            {"target_schema", p.target_schema_name},
            {"created_by", p.created_by},
            {"generation", p.generation},
            {"rules", rules_to_json(p.rules)}};
}

json to_json(const DecisionProgram& p) {
    return {{"kind", "decision"},
            {"program_id", p.program_id},
            {"created_by", p.created_by},
            {"predicate", to_json(p.predicate)}};
}

std::string serialize(const ExtractionProgram& p) { return to_json(p).dump(); }
std::string serialize(const DecisionProgram& p) { return to_json(p).dump(); }
std::string serialize(const Program& p) {
    return std::visit([](const auto& x) { return serialize(x); }, p);
}

namespace {

json rule_schema(const schema::SchemaDescriptor& desc) {
    json paths = json::array();
    for (const auto& p : schema::field_paths(desc)) paths.push_back(p);
    return {{"type", "object"},
            {"properties",
             {{"field", {{"type", "string"}, {"enum", paths}, {"description", "Target field path."}}},
              {"selector", {{"type", "string"}, {"minLength", 1}, {"description", "CSS selector."}}},
              {"node_index",
               {{"type", "integer"}, {"minimum", 0}, {"description", "Which match to use, in document order."}}},
              {"capture",
               {{"type", "string"}, {"description", "Regular expression; capture group 1 becomes the value."}}},
              {"post_ops", {{"type", "array"}, {"items", {{"$ref", "#/$defs/post_op"}}}}}}},
            {"required", json::array({"field", "selector"})},
            {"additionalProperties", false}};
}

json post_op_schema() {
    auto simple = [](const char* name) {
        return json{{"type", "object"},
                    {"properties", {{"op", {{"const", name}}}}},
                    {"required", json::array({"op"})},
                    {"additionalProperties", false}};
    };
    json strip = {{"type", "object"},
                  {"properties",
                   {{"op", {{"const", "strip_label_prefix"}}},
                    {"prefixes", {{"type", "array"}, {"items", {{"type", "string"}, {"minLength", 1}}}}}}},
                  {"required", json::array({"op"})},
                  {"additionalProperties", false}};
    json unit = {{"type", "object"},
                 {"properties",
                  {{"op", {{"const", "to_unit_code"}}},
                   {"map", {{"type", "object"}, {"additionalProperties", {{"type", "string"}, {"minLength", 1}}}}},
                   {"default", {{"type", "string"}, {"minLength", 1}}}}},
                 {"required", json::array({"op"})},
                 {"additionalProperties", false}};
    return {{"oneOf", json::array({simple("trim"), strip, simple("parse_decimal_comma"), unit})}};
}

json predicate_schema() {
    json node_ref = {{"$ref", "#/$defs/predicate"}};
    auto obj = [](json props, json required) {
        return json{{"type", "object"}, {"properties", std::move(props)}, {"required", std::move(required)},
                    {"additionalProperties", false}};
    };
    json junction = obj({{"op", {{"enum", json::array({"and", "or"})}}},
                         {"args", {{"type", "array"}, {"minItems", 1}, {"items", node_ref}}}},
                        json::array({"op", "args"}));
    json negation = obj({{"op", {{"const", "not"}}}, {"arg", node_ref}}, json::array({"op", "arg"}));
    json keyword = obj({{"op", {{"const", "contains_keyword"}}}, {"keyword", {{"type", "string"}, {"minLength", 1}}}},
                       json::array({"op", "keyword"}));
    json regex = obj({{"op", {{"const", "matches_regex"}}}, {"pattern", {{"type", "string"}, {"minLength", 1}}}},
                     json::array({"op", "pattern"}));
    return {{"oneOf", json::array({junction, negation, keyword, regex})}};
}

} // namespace

json extraction_response_schema(const schema::SchemaDescriptor& desc) {
    return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
            {"title", "ExtractionRules"},
            {"type", "object"},
            {"properties", {{"rules", {{"type", "array"}, {"items", {{"$ref", "#/$defs/rule"}}}}}}},
            {"required", json::array({"rules"})},
            {"additionalProperties", false},
            {"$defs", {{"rule", rule_schema(desc)}, {"post_op", post_op_schema()}}}};
}

json decision_response_schema() {
    return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
            {"title", "DecisionPredicate"},
            {"type", "object"},
            {"properties", {{"predicate", {{"$ref", "#/$defs/predicate"}}}}},
            {"required", json::array({"predicate"})},
            {"additionalProperties", false},
            {"$defs", {{"predicate", predicate_schema()}}}};
}

json program_document_schema(const schema::SchemaDescriptor& desc) {
    json extraction = {{"type", "object"},
                       {"properties",
                        {{"kind", {{"const", "extraction"}}},
                         {"program_id", {{"type", "string"}, {"minLength", 1}}},
                         {"target_schema", {{"const", desc.name}}},
                         {"created_by", {{"type", "string"}}},
                         {"generation", {{"type", "integer"}, {"minimum", 0}}},
                         {"rules", {{"type", "array"}, {"items", {{"$ref", "#/$defs/rule"}}}}}}},
                       {"required", json::array({"kind", "program_id", "rules"})},
                       {"additionalProperties", false}};
    json decision = {{"type", "object"},
                     {"properties",
                      {{"kind", {{"const", "decision"}}},
                       {"program_id", {{"type", "string"}, {"minLength", 1}}},
                       {"created_by", {{"type", "string"}}},
                       {"predicate", {{"$ref", "#/$defs/predicate"}}}}},
                     {"required", json::array({"kind", "program_id", "predicate"})},
                     {"additionalProperties", false}};
    return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
            {"title", "ExtractionDslProgram"},
            {"oneOf", json::array({extraction, decision})},
            {"$defs", {{"rule", rule_schema(desc)}, {"post_op", post_op_schema()}, {"predicate", predicate_schema()}}}};
}

} // namespace shopx::dsl
