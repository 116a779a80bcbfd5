#include "shopx/schema/product.hpp"

#include <cmath>

#include "shopx/common/text.hpp"

namespace shopx::schema {

std::string_view field_name(Field f) noexcept {
    switch (f) {
    case Field::IngredientStatement: return "ingredient_statement";
    case Field::Energy: return "energy";
    case Field::Fat: return "fat";
    case Field::SaturatedFat: return "saturated_fat";
    case Field::Carbohydrates: return "carbohydrates";
    case Field::Sugars: return "sugars";
    case Field::Protein: return "protein";
    case Field::Salt: return "salt";
    }
    return "";
}

std::optional<Field> field_from_name(std::string_view name) noexcept {
    for (Field f : kAllFields) {
        if (field_name(f) == name) return f;
    }
    return std::nullopt;
}

std::optional<QuantitativeValue>& nutrient(FoodProduct& p, Field f) {
    switch (f) {
    case Field::Energy: return p.energy;
    case Field::Fat: return p.fat;
    case Field::SaturatedFat: return p.saturated_fat;
    case Field::Carbohydrates: return p.carbohydrates;
    case Field::Sugars: return p.sugars;
    case Field::Protein: return p.protein;
    case Field::Salt: return p.salt;
    case Field::IngredientStatement: break;
    }
    throw PreconditionViolation("ingredient_statement is not a nutrient");
}

const std::optional<QuantitativeValue>& nutrient(const FoodProduct& p, Field f) {
    return nutrient(const_cast<FoodProduct&>(p), f);
}

bool is_populated(const FoodProduct& p, Field f) {
    if (f == Field::IngredientStatement) return p.ingredient_statement.has_value();
    return nutrient(p, f).has_value();
}

int populated_count(const FoodProduct& p) {
    int n = 0;
    for (Field f : kAllFields) n += is_populated(p, f) ? 1 : 0;
    return n;
}

double filled_field_ratio(const FoodProduct& p) {
    return static_cast<double>(populated_count(p)) / static_cast<double>(kAllFields.size());
}

bool is_known_unit_code(std::string_view code) {
    for (std::string_view known : {"KJO", "E14", "GRM", "MGM"}) {
        if (text::iequals(code, known)) return true;
    }
    return false;
}

const std::vector<std::string>& ingredient_label_prefixes() {
    static const std::vector<std::string> prefixes = {"Zutatenliste:", "Zutaten:", "Zutaten :", "Ingredients:",
                                                      "Inhaltsstoffe:"};
    return prefixes;
}

namespace {

using nlohmann::json;

std::optional<QuantitativeValue> parse_quantity(const json& node, const std::string& path, ProductParse& out) {
    if (!node.is_object()) {
        out.errors.push_back({path, "expected object or null"});
        return std::nullopt;
    }
    QuantitativeValue qv;
    bool value_ok = false;
    for (const auto& [key, v] : node.items()) {
        const std::string sub = path + "." + key;
        if (key == "value") {
            if (v.is_number()) {
                double d = v.get<double>();
                if (!std::isfinite(d)) {
                    out.errors.push_back({sub, "number is not finite"});
                } else {
                    qv.value = d;
                    value_ok = true;
                }
            } else if (v.is_string()) {
                auto d = text::parse_decimal(v.get<std::string>());
                if (!d) {
                    out.errors.push_back({sub, "malformed number '" + v.get<std::string>() + "'"});
                } else {
                    qv.value = *d;
                    value_ok = true;
                }
            } else if (v.is_null()) {
                out.errors.push_back({sub, "missing required value"});
            } else {
                out.errors.push_back({sub, "expected number"});
            }
        } else if (key == "unit_code") {
            if (v.is_null()) continue;
            if (!v.is_string()) {
                out.errors.push_back({sub, "expected string"});
                continue;
            }
            std::string code = v.get<std::string>();
            if (code.empty()) {
                out.errors.push_back({sub, "empty unit code"});
            } else if (is_known_unit_code(code)) {
                for (auto& c : code) c = static_cast<char>(c >= 'a' && c <= 'z' ? c - 'a' + 'A' : c);
                qv.unit_code = std::move(code);
            } else {
                out.warnings.push_back(sub + ": unknown unit code '" + code + "' kept verbatim");
                qv.unit_code = code;
            }
        } else {
            out.errors.push_back({sub, "unknown field"});
        }
    }
    if (!node.contains("value")) out.errors.push_back({path + ".value", "missing required value"});
    if (!value_ok) return std::nullopt;
    return qv;
}

} // namespace

ProductParse parse_product_json(const json& doc) {
    ProductParse out;
    if (!doc.is_object()) {
        out.errors.push_back({"", "expected a JSON object"});
        return out;
    }
    FoodProduct p;
    for (const auto& [key, v] : doc.items()) {
        auto field = field_from_name(key);
        if (!field) {
            out.errors.push_back({key, "unknown field"});
            continue;
        }
        if (v.is_null()) continue;
        if (*field == Field::IngredientStatement) {
            if (!v.is_string()) {
                out.errors.push_back({key, "expected string"});
                continue;
            }
            std::string s = v.get<std::string>();
            for (const auto& prefix : ingredient_label_prefixes()) {
                if (text::starts_with_icase(s, prefix)) {
                    out.warnings.push_back(key + ": stripped label prefix '" + prefix + "'");
                    s = std::string(text::trim(std::string_view(s).substr(prefix.size())));
                    break;
                }
            }
            if (!s.empty()) p.ingredient_statement = std::move(s);
        } else {
            nutrient(p, *field) = parse_quantity(v, key, out);
        }
    }
    if (out.errors.empty()) out.product = std::move(p);
    return out;
}

ProductParse parse_product(std::string_view json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded()) {
        ProductParse out;
        out.errors.push_back({"", "malformed JSON"});
        return out;
    }
    return parse_product_json(doc);
}

FoodProduct parse_product_or_throw(std::string_view json_text) {
    ProductParse parsed = parse_product(json_text);
    if (!parsed.ok()) throw SchemaViolation(std::move(parsed.errors));
    return std::move(*parsed.product);
}

json product_to_json(const FoodProduct& p) {
    json out = json::object();
    if (p.ingredient_statement) out["ingredient_statement"] = *p.ingredient_statement;
    for (Field f : kNutrientFields) {
        const auto& qv = nutrient(p, f);
        if (!qv) continue;
        json q = json::object();
        q["value"] = qv->value;
        if (qv->unit_code) q["unit_code"] = *qv->unit_code;
        out[std::string(field_name(f))] = std::move(q);
    }
    return out;
}

std::string serialize_product(const FoodProduct& p) { return product_to_json(p).dump(); }

} // namespace shopx::schema
