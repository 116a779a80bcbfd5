#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "shopx/common/error.hpp"

namespace shopx::schema {

/// A nutrient quantity: a decimal amount and an optional measurement unit code.
struct QuantitativeValue {
    double value = 0.0;
    std::optional<std::string> unit_code;

    bool operator==(const QuantitativeValue&) const = default;
};

/// Target object: the ingredient statement plus the seven mandatory
/// nutrition-declaration entries. Every attribute is optional; absence means
/// the page does not carry the information.
struct FoodProduct {
    std::optional<std::string> ingredient_statement;
    std::optional<QuantitativeValue> energy;
    std::optional<QuantitativeValue> fat;
    std::optional<QuantitativeValue> saturated_fat;
    std::optional<QuantitativeValue> carbohydrates;
    std::optional<QuantitativeValue> sugars;
    std::optional<QuantitativeValue> protein;
    std::optional<QuantitativeValue> salt;

    bool operator==(const FoodProduct&) const = default;
};

enum class Field { IngredientStatement, Energy, Fat, SaturatedFat, Carbohydrates, Sugars, Protein, Salt };

inline constexpr std::array<Field, 8> kAllFields = {Field::IngredientStatement, Field::Energy, Field::Fat,
                                                    Field::SaturatedFat, Field::Carbohydrates, Field::Sugars,
                                                    Field::Protein, Field::Salt};

inline constexpr std::array<Field, 7> kNutrientFields = {Field::Energy, Field::Fat, Field::SaturatedFat,
                                                         Field::Carbohydrates, Field::Sugars, Field::Protein,
                                                         Field::Salt};

std::string_view field_name(Field f) noexcept;
std::optional<Field> field_from_name(std::string_view name) noexcept;

std::optional<QuantitativeValue>& nutrient(FoodProduct& p, Field f);
const std::optional<QuantitativeValue>& nutrient(const FoodProduct& p, Field f);

bool is_populated(const FoodProduct& p, Field f);
int populated_count(const FoodProduct& p);

/// populated top-level attributes / 8
double filled_field_ratio(const FoodProduct& p);

/// Unit codes with known meaning: KJO (kJ), E14 (kcal), GRM (g), MGM (mg).
bool is_known_unit_code(std::string_view code);

/// Label prefixes that must not lead an ingredient statement ("Zutaten:" ...).
const std::vector<std::string>& ingredient_label_prefixes();

struct ProductParse {
    std::optional<FoodProduct> product;
    std::vector<FieldError> errors;
    std::vector<std::string> warnings;

    bool ok() const noexcept { return product.has_value(); }
};

/// Parses and validates a model response. Accepts decimal commas in numeric
/// strings, treats null as absent, canonicalises known unit codes to upper
/// case, and strips a leading ingredient label prefix (with a warning).
ProductParse parse_product(std::string_view json_text);
ProductParse parse_product_json(const nlohmann::json& doc);

/// Throws SchemaViolation on failure.
FoodProduct parse_product_or_throw(std::string_view json_text);

nlohmann::json product_to_json(const FoodProduct& p);
/// Canonical serialization: absent attributes omitted, sorted keys, decimal point.
std::string serialize_product(const FoodProduct& p);

} // namespace shopx::schema
