#pragma once

#include <vector>

#include "json.hpp"
#include "shopx/common/error.hpp"

namespace shopx::schema {

/// Validates `instance` against a JSON Schema. Covers the keyword subset used
/// for structured outputs: type, enum, const, properties, required,
/// additionalProperties, items, min/maxItems, min/maxLength, pattern,
/// minimum, maximum, anyOf, oneOf, allOf, not, and local $ref into $defs or
/// definitions. Returns an empty list when the instance is valid.
std::vector<FieldError> validate_json(const nlohmann::json& schema, const nlohmann::json& instance);

/// Structural problems in a schema document itself (bad type names,
/// unresolvable $ref, uncompilable pattern, non-object subschemas).
std::vector<FieldError> check_schema(const nlohmann::json& schema);

} // namespace shopx::schema
