#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shopx/corpus/corpus.hpp"
#include "shopx/dsl/program.hpp"
#include "shopx/html/compress.hpp"
#include "shopx/llm/gateway.hpp"
#include "shopx/schema/descriptor.hpp"
#include "shopx/schema/product.hpp"

namespace shopx::indirect {

struct OrchestratorConfig {
    int decision_ensemble_size = 5;
    int bootstrap_sample_size = 10;
    double reference_fill_threshold = 0.8;
    int max_refinements = 5;
    int max_alternatives = 3;
    int max_decision_attempts = 3;
    int min_valid_attributes = 1;
    std::uint64_t rng_seed = 0;
    std::string primary_model = "o3-mini";
    std::string decision_model = "gpt-4o";
    html::Variant reference_variant = html::Variant::HtmlCompressed;
    std::size_t threads = 1; ///< local program evaluation only; model calls stay sequential

    /// Throws PreconditionViolation.
    void validate() const;
    nlohmann::json to_json() const;
    /// Missing keys keep their defaults.
    static OrchestratorConfig from_json(const nlohmann::json& j);
};

class EnsembleBootstrapFailed : public Error {
public:
    using Error::Error;
};

class ReferenceUnattainable : public Error {
public:
    using Error::Error;
};

struct LabeledSample {
    html::CompressedDocument text; ///< TEXT variant
    bool positive = false;
};

struct LibraryEntry {
    dsl::ExtractionProgram program;
    std::string source_page_id;
    double reference_similarity = 0.0;
    bool accepted = false;
    int pages_matched = 0;
    long long attributes_total = 0; ///< summed over matched pages

    double mean_attributes_extracted() const {
        return pages_matched == 0 ? 0.0 : static_cast<double>(attributes_total) / pages_matched;
    }
};

class FunctionLibrary {
public:
    /// Throws PreconditionViolation for a duplicate program_id.
    void add(LibraryEntry e);
    const std::vector<LibraryEntry>& entries() const noexcept { return entries_; }
    std::vector<LibraryEntry>& entries() noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    nlohmann::json to_json() const;
    static FunctionLibrary from_json(const nlohmann::json& j);

private:
    std::vector<LibraryEntry> entries_;
};

struct ShopRunMetrics {
    std::string shop_id;
    std::uint64_t seed = 0;
    int pages_total = 0;
    int llm_calls_primary_model = 0;
    int llm_calls_decision_model = 0;
    int functions_generated = 0;
    int refinements_performed = 0;
    int reference_extractions = 0;
    int reference_failures = 0;
    int syntheses = 0;
    int max_calls_per_synthesis = 0;
    int decision_positive_pages = 0;
    int pages_with_result = 0;
    std::optional<double> decision_accuracy; ///< percent, against truth presence flags
    std::optional<double> accuracy;          ///< percent, mean similarity to truth
    llm::Money cost_primary;
    llm::Money cost_decision;
    llm::Money cost_total;

    nlohmann::json to_json() const;
    static ShopRunMetrics from_json(const nlohmann::json& j);
};

struct PageResult {
    std::string page_id;
    schema::FoodProduct product;
    std::optional<std::string> program_id; ///< library program that produced the product
    bool decision = false;
    /// "library", "synthesized", "decision_negative", "no_result", "reference_unattainable" or "failed"
    std::string status;
    std::optional<std::string> error;
};

struct SynthesisOutcome {
    std::string page_id;
    dsl::ExtractionProgram best;
    bool accepted = false;
    double similarity = 0.0;
    int generations = 0;
    int refinements = 0;
    int primary_calls = 0;
};

struct ShopRun {
    std::vector<PageResult> results; ///< corpus order
    FunctionLibrary library;
    ShopRunMetrics metrics;
    llm::CostLedger ledger;
    std::vector<dsl::DecisionProgram> ensemble;
    std::vector<SynthesisOutcome> syntheses;
    std::vector<std::string> visit_order;
};

/// Generates `decision_ensemble_size` programs, regenerating each up to
/// `max_decision_attempts` times until it classifies every sample correctly.
std::vector<dsl::DecisionProgram> build_decision_ensemble(const std::vector<LabeledSample>& samples,
                                                          llm::Gateway& gateway, const OrchestratorConfig& cfg);

/// Strict majority of the programs' outputs on a TEXT document.
bool decide(const std::vector<dsl::DecisionProgram>& ensemble, const html::CompressedDocument& text);

/// Direct extraction whose result fills at least the configured share of
/// fields, with one TEXT retry on a shortfall. `calls` receives the number of
/// model calls made.
schema::FoodProduct acquire_reference(const html::CompressedDocument& page, const schema::SchemaDescriptor& desc,
                                      llm::Gateway& gateway, const OrchestratorConfig& cfg, int* calls = nullptr);

/// Generation plus refinement cycles against `reference`; returns the best
/// program seen (ties go to the earliest).
SynthesisOutcome synthesize_program(const html::CompressedDocument& page, const schema::FoodProduct& reference,
                                    const schema::SchemaDescriptor& desc, llm::Gateway& gateway,
                                    const OrchestratorConfig& cfg);

/// Bootstrap samples from the corpus labels, or from ground truth (five
/// positive and five negative pages drawn by seed) when there are none.
std::vector<std::string> bootstrap_page_ids(const corpus::Corpus& corpus, const OrchestratorConfig& cfg);

/// The whole indirect strategy over one shop.
ShopRun process_shop(const corpus::Corpus& corpus, llm::Provider& provider, const llm::PriceTable& prices,
                     const OrchestratorConfig& cfg,
                     const schema::SchemaDescriptor& desc = schema::food_product_descriptor());

/// Seed of run `index` under the repeated-run protocol.
std::uint64_t run_seed(std::uint64_t master_seed, int index);

using ProviderFactory = std::function<std::unique_ptr<llm::Provider>(std::uint64_t run_seed)>;

/// `runs` independent executions of process_shop, run i seeded with
/// run_seed(cfg.rng_seed, i) and given a provider made for that seed.
std::vector<ShopRun> process_runs(const corpus::Corpus& corpus, const ProviderFactory& make_provider,
                                  const llm::PriceTable& prices, const OrchestratorConfig& cfg, int runs,
                                  const schema::SchemaDescriptor& desc = schema::food_product_descriptor());

} // namespace shopx::indirect
