#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace shopx::schema {

enum class SemanticType { String, QuantitativeValue };

struct FieldDescriptor {
    std::string name;
    SemanticType type = SemanticType::String;
    /// Ontology description, optionally followed by extraction instructions.
    std::string description;
};

/// Machine-readable description of a target object, used both for prompts and
/// for validating responses.
struct SchemaDescriptor {
    std::string name;
    std::string description;
    std::vector<FieldDescriptor> fields;

    const FieldDescriptor* find(std::string_view field) const;
};

/// Pattern accepted for numeric strings ("3.5", "3,5").
inline constexpr std::string_view kDecimalStringPattern = "^[ \\t\\n\\r\\f\\v]*[+-]?[0-9]+([.,][0-9]+)?[ \\t\\n\\r\\f\\v]*$";

/// The eight-attribute food product descriptor.
const SchemaDescriptor& food_product_descriptor();

/// JSON Schema (draft 2020-12) embedding all field descriptions. Byte-stable
/// for a fixed descriptor.
std::string to_json_schema(const SchemaDescriptor& desc);
nlohmann::json to_json_schema_document(const SchemaDescriptor& desc);

nlohmann::json descriptor_to_json(const SchemaDescriptor& desc);
/// Throws SchemaViolation when the document is not a valid descriptor.
SchemaDescriptor descriptor_from_json(const nlohmann::json& doc);
SchemaDescriptor load_descriptor(const std::string& path);

/// Field paths addressable by extraction rules: plain names for strings,
/// name.value and name.unit_code for quantities.
std::vector<std::string> field_paths(const SchemaDescriptor& desc);

} // namespace shopx::schema
