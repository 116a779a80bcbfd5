#pragma once

// Hand-computed expectations for two-field products (ingredient_statement and
// fat); the other six attributes are absent on both sides and score 1 each.

#include <array>
#include <optional>
#include <string>

#include "shopx/schema/product.hpp"
#include "shopx/similarity/similarity.hpp"

namespace shopx::testing {

// Per-field situation between extracted and reference.
enum class Slot { BothAbsent, ExtraOnly, RefOnly, Match, Differ };

inline constexpr std::array<Slot, 5> kSlots = {Slot::BothAbsent, Slot::ExtraOnly, Slot::RefOnly, Slot::Match,
                                               Slot::Differ};

// "Zucker" vs "Zucker, Salz": distance 6 over 12 code points -> 0.5.
// fat 3.5 GRM vs 4 GRM: value wrong, unit right -> 0.5.
inline constexpr double kOverall[5][5] = {
    // fat: absent  extra   ref     match   differ
    {1.0, 0.875, 0.875, 1.0, 0.9375},         // ingredients both absent
    {0.875, 0.75, 0.75, 0.875, 0.8125},       // ingredients extra only
    {0.875, 0.75, 0.75, 0.875, 0.8125},       // ingredients reference only
    {1.0, 0.875, 0.875, 1.0, 0.9375},         // ingredients match
    {0.9375, 0.8125, 0.8125, 0.9375, 0.875},  // ingredients differ
};

inline constexpr int kMismatchCount[5][5] = {
    {0, 1, 1, 0, 1}, {1, 2, 2, 1, 2}, {1, 2, 2, 1, 2}, {0, 1, 1, 0, 1}, {1, 2, 2, 1, 2},
};

inline std::optional<similarity::MismatchKind> expected_kind(Slot s) {
    switch (s) {
    case Slot::ExtraOnly: return similarity::MismatchKind::AdditionalAttribute;
    case Slot::RefOnly: return similarity::MismatchKind::MissingAttribute;
    case Slot::Differ: return similarity::MismatchKind::ValueMismatch;
    default: return std::nullopt;
    }
}

struct ProductPair {
    schema::FoodProduct extracted;
    schema::FoodProduct reference;
};

inline ProductPair build_pair(Slot ingredients, Slot fat) {
    ProductPair p;
    const std::string want_i = "Zucker, Salz";
    const schema::QuantitativeValue want_f{3.5, "GRM"};
    switch (ingredients) {
    case Slot::BothAbsent: break;
    case Slot::ExtraOnly: p.extracted.ingredient_statement = want_i; break;
    case Slot::RefOnly: p.reference.ingredient_statement = want_i; break;
    case Slot::Match: p.extracted.ingredient_statement = p.reference.ingredient_statement = want_i; break;
    case Slot::Differ:
        p.extracted.ingredient_statement = "Zucker";
        p.reference.ingredient_statement = want_i;
        break;
    }
    switch (fat) {
    case Slot::BothAbsent: break;
    case Slot::ExtraOnly: p.extracted.fat = want_f; break;
    case Slot::RefOnly: p.reference.fat = want_f; break;
    case Slot::Match: p.extracted.fat = p.reference.fat = want_f; break;
    case Slot::Differ:
        p.extracted.fat = schema::QuantitativeValue{4.0, "GRM"};
        p.reference.fat = want_f;
        break;
    }
    return p;
}

inline schema::FoodProduct full_reference_product() {
    schema::FoodProduct p;
    p.ingredient_statement = "Zucker, Kakaobutter, Vollmilchpulver";
    p.energy = schema::QuantitativeValue{2250, "KJO"};
    p.fat = schema::QuantitativeValue{31.0, "GRM"};
    p.saturated_fat = schema::QuantitativeValue{19.0, "GRM"};
    p.carbohydrates = schema::QuantitativeValue{57.0, "GRM"};
    p.sugars = schema::QuantitativeValue{56.0, "GRM"};
    p.protein = schema::QuantitativeValue{6.3, "GRM"};
    p.salt = schema::QuantitativeValue{0.24, "GRM"};
    return p;
}

} // namespace shopx::testing
