#include "shopx/schema/descriptor.hpp"

#include <fstream>

#include "shopx/common/error.hpp"

namespace shopx::schema {

using nlohmann::json;

const FieldDescriptor* SchemaDescriptor::find(std::string_view field) const {
    for (const auto& f : fields) {
        if (f.name == field) return &f;
    }
    return nullptr;
}

const SchemaDescriptor& food_product_descriptor() {
    static const SchemaDescriptor desc = [] {
        SchemaDescriptor d;
        d.name = "FoodBeverageTobaccoProduct";
        d.description = "A food, beverage or tobacco product.";
        d.fields = {
            {"ingredient_statement", SemanticType::String,
             "Information on the constituent ingredient make up of the product specified as one string.\n\n"
             "Additional description:\n- Remove unnecessary prefixes"},
            {"energy", SemanticType::QuantitativeValue,
             "The amount of energy per nutrient basis quantity, for example kilojoules (KJO) or kilocalories (E14) "
             "per 100 g."},
            {"fat", SemanticType::QuantitativeValue, "The total amount of fat per nutrient basis quantity."},
            {"saturated_fat", SemanticType::QuantitativeValue,
             "The amount of saturated fatty acids per nutrient basis quantity."},
            {"carbohydrates", SemanticType::QuantitativeValue,
             "The total amount of carbohydrates per nutrient basis quantity."},
            {"sugars", SemanticType::QuantitativeValue, "The amount of sugars per nutrient basis quantity."},
            {"protein", SemanticType::QuantitativeValue, "The amount of protein per nutrient basis quantity."},
            {"salt", SemanticType::QuantitativeValue, "The amount of salt per nutrient basis quantity."},
        };
        return d;
    }();
    return desc;
}

json to_json_schema_document(const SchemaDescriptor& desc) {
    json properties = json::object();
    bool needs_quantity = false;
    for (const auto& f : desc.fields) {
        json prop;
        if (f.type == SemanticType::String) {
            prop["type"] = json::array({"string", "null"});
        } else {
            needs_quantity = true;
            prop["anyOf"] = json::array({json{{"$ref", "#/$defs/QuantitativeValue"}}, json{{"type", "null"}}});
        }
        prop["description"] = f.description;
        properties[f.name] = std::move(prop);
    }
    json schema = {
        {"$schema", "https://json-schema.org/draft/2020-12/schema"},
        {"title", desc.name},
        {"description", desc.description},
        {"type", "object"},
        {"properties", std::move(properties)},
        {"additionalProperties", false},
    };
    if (needs_quantity) {
        schema["$defs"]["QuantitativeValue"] = {
            {"type", "object"},
            {"description", "A quantity with a decimal value and a unit code."},
            {"properties",
             {{"value",
               {{"description", "The numeric value (decimal point or decimal comma)."},
                {"anyOf", json::array({json{{"type", "number"}},
                                       json{{"type", "string"}, {"pattern", std::string(kDecimalStringPattern)}}})}}},
              {"unit_code",
               {{"description", "UN/CEFACT unit code such as KJO, E14, GRM or MGM."},
                {"type", json::array({"string", "null"})},
                {"minLength", 1}}}}},
            {"required", json::array({"value"})},
            {"additionalProperties", false},
        };
    }
    return schema;
}

std::string to_json_schema(const SchemaDescriptor& desc) { return to_json_schema_document(desc).dump(2); }

json descriptor_to_json(const SchemaDescriptor& desc) {
    json fields = json::array();
    for (const auto& f : desc.fields) {
        fields.push_back({{"name", f.name},
                          {"type", f.type == SemanticType::String ? "string" : "quantitative_value"},
                          {"description", f.description}});
    }
    return {{"name", desc.name}, {"description", desc.description}, {"fields", std::move(fields)}};
}

SchemaDescriptor descriptor_from_json(const json& doc) {
    std::vector<FieldError> errors;
    SchemaDescriptor desc;
    if (!doc.is_object()) throw SchemaViolation("", "descriptor must be an object");
    if (!doc.contains("name") || !doc["name"].is_string()) errors.push_back({"name", "expected string"});
    else desc.name = doc["name"].get<std::string>();
    if (doc.contains("description") && doc["description"].is_string()) {
        desc.description = doc["description"].get<std::string>();
    }
    if (!doc.contains("fields") || !doc["fields"].is_array()) {
        errors.push_back({"fields", "expected array"});
    } else {
        for (std::size_t i = 0; i < doc["fields"].size(); ++i) {
            const json& f = doc["fields"][i];
            const std::string path = "fields[" + std::to_string(i) + "]";
            if (!f.is_object() || !f.contains("name") || !f["name"].is_string() || f["name"].get<std::string>().empty()) {
                errors.push_back({path + ".name", "expected non-empty string"});
                continue;
            }
            FieldDescriptor fd;
            fd.name = f["name"].get<std::string>();
            std::string type = f.value("type", std::string("string"));
            if (type == "string") fd.type = SemanticType::String;
            else if (type == "quantitative_value") fd.type = SemanticType::QuantitativeValue;
            else errors.push_back({path + ".type", "unknown semantic type '" + type + "'"});
            fd.description = f.value("description", std::string());
            if (desc.find(fd.name) != nullptr) errors.push_back({path + ".name", "duplicate field"});
            desc.fields.push_back(std::move(fd));
        }
    }
    if (!errors.empty()) throw SchemaViolation(std::move(errors));
    return desc;
}

SchemaDescriptor load_descriptor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open descriptor file '" + path + "'");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw SchemaViolation("", "malformed JSON in '" + path + "'");
    return descriptor_from_json(doc);
}

std::vector<std::string> field_paths(const SchemaDescriptor& desc) {
    std::vector<std::string> out;
    for (const auto& f : desc.fields) {
        if (f.type == SemanticType::String) {
            out.push_back(f.name);
        } else {
            out.push_back(f.name + ".value");
            out.push_back(f.name + ".unit_code");
        }
    }
    return out;
}

} // namespace shopx::schema
