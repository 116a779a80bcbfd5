#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "shopx/common/error.hpp"
#include "shopx/dsl/program.hpp"
#include "shopx/html/compress.hpp"
#include "shopx/schema/product.hpp"

namespace shopx::corpus {

enum class NutritionLayout { Table, DefinitionList, DivGrid };

std::string_view to_string(NutritionLayout l) noexcept;

/// Structural skeleton of one page template. Every class name a template uses
/// starts with `class_prefix`, so programs written for one template find
/// nothing on the others.
struct TemplateSpec {
    std::string template_id;
    std::string class_prefix;
    NutritionLayout layout = NutritionLayout::Table;
    bool decimal_comma = true;
    bool energy_in_kcal = false;     ///< otherwise kJ, with kcal shown alongside
    bool ingredient_label_inline = true; ///< statement text starts with the label ("Zutaten: ...")
    std::string ingredient_label = "Zutaten";
    std::string nutrition_heading = "Nährwerte je 100 g";
    std::string energy_label = "Brennwert";
    double optional_attribute_dropout = 0.0; ///< chance that one nutrient row is left out
    int wrapper_div_jitter = 0;              ///< up to this many extra wrapper divs

    bool operator==(const TemplateSpec&) const = default;
};

struct MissingRates {
    double only_nutrition_missing = 0.132;
    double only_ingredients_missing = 0.160;
    double both_missing = 0.184;

    bool operator==(const MissingRates&) const = default;
};

struct ShopSpec {
    std::string shop_id;
    int n_pages = 100;
    std::vector<TemplateSpec> templates;
    MissingRates missing_rates;
    std::uint64_t seed = 7;
};

struct GroundTruthRecord {
    std::string page_id;
    std::string template_id;
    schema::FoodProduct product;
    bool has_nutrition = false;
    bool has_ingredients = false;

    bool operator==(const GroundTruthRecord&) const = default;
};

/// A page counts as positive when it carries both an ingredient statement and
/// a nutrition declaration.
inline bool is_positive(const GroundTruthRecord& r) noexcept { return r.has_nutrition && r.has_ingredients; }

struct Corpus {
    std::string shop_id;
    std::vector<html::RawDocument> pages;
    std::vector<GroundTruthRecord> truth; ///< same order as pages
    std::map<std::string, bool> labels;  ///< bootstrap samples: page_id -> positive
    std::vector<TemplateSpec> templates;

    const GroundTruthRecord* truth_for(std::string_view page_id) const;
    const TemplateSpec* template_for(std::string_view template_id) const;
};

class UnknownTemplate : public Error {
public:
    using Error::Error;
};

class UnknownPreset : public Error {
public:
    using Error::Error;
};

/// Page counts per category: [only nutrition missing, only ingredients missing, both missing].
std::array<int, 3> missing_quotas(int n_pages, const MissingRates& rates);

/// Throws PreconditionViolation for an inconsistent ShopSpec.
void validate(const ShopSpec& spec);

/// Deterministic in spec.seed. Labels hold up to five positive and five
/// negative pages drawn by seed.
Corpus generate_shop(const ShopSpec& spec);

const std::vector<TemplateSpec>& shipped_templates();
std::vector<std::string> preset_names();
/// "alpha", "beta" and "gamma" use one, two and three templates.
ShopSpec preset(std::string_view name, int n_pages, std::uint64_t seed);

/// A program that reproduces the ground truth of every page built from `t`.
dsl::ExtractionProgram true_program_for(const TemplateSpec& t);
/// Looks the template up among the shipped ones; throws UnknownTemplate.
dsl::ExtractionProgram true_program_for(std::string_view template_id);

nlohmann::json to_json(const TemplateSpec& t);
TemplateSpec template_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GroundTruthRecord& r);
GroundTruthRecord truth_from_json(const nlohmann::json& j);

/// Writes pages/<page_id>.html, truth.jsonl, labels.json and templates.json.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
/// Reads a corpus directory. truth.jsonl, labels.json and templates.json are
/// optional; pages are ordered by page_id.
Corpus load_corpus(const std::filesystem::path& dir);

} // namespace shopx::corpus
