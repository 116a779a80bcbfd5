#include "shopx/schema/json_schema.hpp"

#include <algorithm>
#include <optional>
#include <regex>

namespace shopx::schema {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

bool type_matches(const std::string& type, const json& v) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "number") return v.is_number();
    if (type == "integer") {
        if (v.is_number_integer()) return true;
        if (v.is_number_float()) {
            double d = v.get<double>();
            return d == static_cast<double>(static_cast<long long>(d));
        }
        return false;
    }
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    return false;
}

// Non-negative integer keyword argument; signed literals count too.
bool is_count(const json& v) { return v.is_number_integer() && v.get<long long>() >= 0; }

std::size_t utf8_length(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
    return n;
}

const json* resolve_ref(const json& root, const std::string& ref) {
    if (ref == "#") return &root;
    if (!ref.starts_with("#/")) return nullptr;
    const json* node = &root;
    std::size_t pos = 2;
    while (pos <= ref.size()) {
        std::size_t next = ref.find('/', pos);
        std::string token = ref.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (!node->is_object() || !node->contains(token)) return nullptr;
        node = &(*node)[token];
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return node;
}

class Validator {
public:
    explicit Validator(const json& root) : root_(root) {}

    void validate(const json& schema, const json& v, const std::string& path, std::vector<FieldError>& errors,
                  int depth = 0) const {
        if (depth > 64) {
            errors.push_back({path, "schema recursion too deep"});
            return;
        }
        if (schema.is_boolean()) {
            if (!schema.get<bool>()) errors.push_back({path, "no value allowed here"});
            return;
        }
        if (!schema.is_object()) return;

        if (auto it = schema.find("$ref"); it != schema.end() && it->is_string()) {
            const json* target = resolve_ref(root_, it->get<std::string>());
            if (target == nullptr) {
                errors.push_back({path, "unresolvable $ref " + it->get<std::string>()});
                return;
            }
            validate(*target, v, path, errors, depth + 1);
        }

        if (auto it = schema.find("type"); it != schema.end()) {
            bool ok = false;
            std::string expected;
            if (it->is_string()) {
                ok = type_matches(it->get<std::string>(), v);
                expected = it->get<std::string>();
            } else if (it->is_array()) {
                for (const auto& t : *it) {
                    if (!t.is_string()) continue;
                    ok = ok || type_matches(t.get<std::string>(), v);
                    expected += expected.empty() ? t.get<std::string>() : "|" + t.get<std::string>();
                }
            }
            if (!ok) {
                errors.push_back({path, "expected " + expected});
                return;
            }
        }

        if (auto it = schema.find("enum"); it != schema.end() && it->is_array()) {
            bool found = false;
            for (const auto& e : *it) found = found || e == v;
            if (!found) errors.push_back({path, "value not in enum"});
        }
        if (auto it = schema.find("const"); it != schema.end() && *it != v) {
            errors.push_back({path, "value differs from const"});
        }

        if (v.is_object()) validate_object(schema, v, path, errors, depth);
        if (v.is_array()) validate_array(schema, v, path, errors, depth);
        if (v.is_string()) validate_string(schema, v.get<std::string>(), path, errors);
        if (v.is_number()) {
            double d = v.get<double>();
            if (auto it = schema.find("minimum"); it != schema.end() && it->is_number() && d < it->get<double>()) {
                errors.push_back({path, "below minimum"});
            }
            if (auto it = schema.find("maximum"); it != schema.end() && it->is_number() && d > it->get<double>()) {
                errors.push_back({path, "above maximum"});
            }
        }

        if (auto it = schema.find("allOf"); it != schema.end() && it->is_array()) {
            for (const auto& sub : *it) validate(sub, v, path, errors, depth + 1);
        }
        if (auto it = schema.find("anyOf"); it != schema.end() && it->is_array()) {
            bool any = false;
            // A branch that failed only below this node explains the failure best.
            std::optional<std::vector<FieldError>> nested;
            std::string reasons;
            for (const auto& sub : *it) {
                std::vector<FieldError> trial;
                validate(sub, v, path, trial, depth + 1);
                if (trial.empty()) {
                    any = true;
                    break;
                }
                for (const auto& e : trial) reasons += (reasons.empty() ? "" : "; ") + e.reason;
                bool deeper = std::all_of(trial.begin(), trial.end(), [&](const FieldError& e) { return e.path != path; });
                if (deeper && (!nested || trial.size() < nested->size())) nested = std::move(trial);
            }
            if (!any && nested) errors.insert(errors.end(), nested->begin(), nested->end());
            else if (!any) errors.push_back({path, "matches none of anyOf (" + reasons + ")"});
        }
        if (auto it = schema.find("oneOf"); it != schema.end() && it->is_array()) {
            int count = 0;
            for (const auto& sub : *it) {
                std::vector<FieldError> trial;
                validate(sub, v, path, trial, depth + 1);
                count += trial.empty() ? 1 : 0;
            }
            if (count != 1) errors.push_back({path, "matches " + std::to_string(count) + " of oneOf"});
        }
        if (auto it = schema.find("not"); it != schema.end()) {
            std::vector<FieldError> trial;
            validate(*it, v, path, trial, depth + 1);
            if (trial.empty()) errors.push_back({path, "matches schema under not"});
        }
    }

private:
    void validate_object(const json& schema, const json& v, const std::string& path, std::vector<FieldError>& errors,
                         int depth) const {
        const json* props = nullptr;
        if (auto it = schema.find("properties"); it != schema.end() && it->is_object()) props = &*it;
        if (auto it = schema.find("required"); it != schema.end() && it->is_array()) {
            for (const auto& r : *it) {
                if (r.is_string() && !v.contains(r.get<std::string>())) {
                    errors.push_back({join(path, r.get<std::string>()), "missing required property"});
                }
            }
        }
        auto additional = schema.find("additionalProperties");
        for (const auto& [key, value] : v.items()) {
            if (props != nullptr && props->contains(key)) {
                validate((*props)[key], value, join(path, key), errors, depth + 1);
            } else if (additional != schema.end()) {
                if (additional->is_boolean() && !additional->get<bool>()) {
                    errors.push_back({join(path, key), "unknown property"});
                } else if (additional->is_object()) {
                    validate(*additional, value, join(path, key), errors, depth + 1);
                }
            }
        }
    }

    void validate_array(const json& schema, const json& v, const std::string& path, std::vector<FieldError>& errors,
                        int depth) const {
        if (auto it = schema.find("minItems"); it != schema.end() && is_count(*it) &&
                                               v.size() < it->get<std::size_t>()) {
            errors.push_back({path, "too few items"});
        }
        if (auto it = schema.find("maxItems"); it != schema.end() && is_count(*it) &&
                                               v.size() > it->get<std::size_t>()) {
            errors.push_back({path, "too many items"});
        }
        if (auto it = schema.find("items"); it != schema.end() && (it->is_object() || it->is_boolean())) {
            for (std::size_t i = 0; i < v.size(); ++i) validate(*it, v[i], index_path(path, i), errors, depth + 1);
        }
    }

    void validate_string(const json& schema, const std::string& s, const std::string& path,
                         std::vector<FieldError>& errors) const {
        if (auto it = schema.find("minLength"); it != schema.end() && is_count(*it) &&
                                                utf8_length(s) < it->get<std::size_t>()) {
            errors.push_back({path, "string too short"});
        }
        if (auto it = schema.find("maxLength"); it != schema.end() && is_count(*it) &&
                                                utf8_length(s) > it->get<std::size_t>()) {
            errors.push_back({path, "string too long"});
        }
        if (auto it = schema.find("pattern"); it != schema.end() && it->is_string()) {
            try {
                if (!std::regex_search(s, std::regex(it->get<std::string>(), std::regex::ECMAScript))) {
                    errors.push_back({path, "does not match pattern"});
                }
            } catch (const std::regex_error&) {
                errors.push_back({path, "schema pattern does not compile"});
            }
        }
    }

    const json& root_;
};

void check_node(const json& root, const json& node, const std::string& path, std::vector<FieldError>& problems) {
    if (node.is_boolean()) return;
    if (!node.is_object()) {
        problems.push_back({path, "subschema must be an object or boolean"});
        return;
    }
    static const std::vector<std::string> kTypes = {"object", "array", "string", "number", "integer", "boolean", "null"};
    auto check_type_name = [&](const json& t) {
        if (!t.is_string() || std::find(kTypes.begin(), kTypes.end(), t.get<std::string>()) == kTypes.end()) {
            problems.push_back({join(path, "type"), "invalid type name"});
        }
    };
    if (auto it = node.find("type"); it != node.end()) {
        if (it->is_array()) {
            for (const auto& t : *it) check_type_name(t);
        } else {
            check_type_name(*it);
        }
    }
    if (auto it = node.find("$ref"); it != node.end()) {
        if (!it->is_string() || resolve_ref(root, it->get<std::string>()) == nullptr) {
            problems.push_back({join(path, "$ref"), "unresolvable reference"});
        }
    }
    if (auto it = node.find("pattern"); it != node.end()) {
        try {
            if (!it->is_string()) throw std::regex_error(std::regex_constants::error_badrepeat);
            std::regex re(it->get<std::string>(), std::regex::ECMAScript);
        } catch (const std::regex_error&) {
            problems.push_back({join(path, "pattern"), "pattern does not compile"});
        }
    }
    if (auto it = node.find("required"); it != node.end() && !it->is_array()) {
        problems.push_back({join(path, "required"), "must be an array"});
    }
    for (const char* key : {"properties", "$defs", "definitions"}) {
        if (auto it = node.find(key); it != node.end()) {
            if (!it->is_object()) {
                problems.push_back({join(path, key), "must be an object"});
                continue;
            }
            for (const auto& [name, sub] : it->items()) check_node(root, sub, join(join(path, key), name), problems);
        }
    }
    for (const char* key : {"items", "additionalProperties", "not"}) {
        if (auto it = node.find(key); it != node.end()) check_node(root, *it, join(path, key), problems);
    }
    for (const char* key : {"anyOf", "oneOf", "allOf"}) {
        if (auto it = node.find(key); it != node.end()) {
            if (!it->is_array() || it->empty()) {
                problems.push_back({join(path, key), "must be a non-empty array"});
                continue;
            }
            for (std::size_t i = 0; i < it->size(); ++i) check_node(root, (*it)[i], index_path(join(path, key), i), problems);
        }
    }
}

} // namespace

std::vector<FieldError> validate_json(const json& schema, const json& instance) {
    std::vector<FieldError> errors;
    Validator(schema).validate(schema, instance, "", errors);
    return errors;
}

std::vector<FieldError> check_schema(const json& schema) {
    std::vector<FieldError> problems;
    check_node(schema, schema, "", problems);
    return problems;
}

} // namespace shopx::schema
