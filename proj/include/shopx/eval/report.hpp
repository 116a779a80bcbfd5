#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "shopx/common/error.hpp"
#include "shopx/corpus/corpus.hpp"
#include "shopx/llm/ledger.hpp"
#include "shopx/schema/product.hpp"

namespace shopx::eval {

enum class Strategy { Direct, Indirect };

std::string_view to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view s);

class MissingTruth : public Error {
public:
    using Error::Error;
};

class CorpusMismatch : public Error {
public:
    using Error::Error;
};

/// Population statistics; all zero for an empty sample.
struct DistributionStats {
    std::size_t n = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev = 0.0;

    static DistributionStats of(const std::vector<double>& xs);
    bool operator==(const DistributionStats&) const = default;
};

struct PageProduct {
    std::string page_id;
    schema::FoodProduct product;
};

/// Products and model calls of one run over one shop.
struct RunInput {
    std::vector<PageProduct> products;
    llm::CostLedger ledger;
};

struct ShopReport {
    std::string shop_id;
    std::string variant; ///< "html_compressed", "text" or empty
    std::string corpus_fingerprint;
    int pages = 0;
    int runs = 0;
    double accuracy = 0.0; ///< mean of accuracy_runs
    std::vector<double> accuracy_runs;
    DistributionStats accuracy_distribution;
    double calls_primary = 0.0;  ///< mean per run
    double calls_decision = 0.0; ///< mean per run
    std::map<std::string, double> calls_by_role; ///< mean per run
    llm::Money cost_total;                       ///< summed over runs

    bool operator==(const ShopReport&) const = default;
};

struct RunReport {
    Strategy strategy = Strategy::Direct;
    std::vector<ShopReport> shops;

    /// Unweighted mean of the shops' accuracies.
    double mean_accuracy() const;
    /// Mean over every page of every shop.
    double page_weighted_accuracy() const;
    bool operator==(const RunReport&) const = default;
};

/// Identifies a corpus by its page ids and true products.
std::string corpus_fingerprint(const std::vector<corpus::GroundTruthRecord>& truth);

/// 100 x mean similarity of one run's products to the truth. Pages without a
/// result count as empty products. Throws MissingTruth for a result whose
/// page has no truth record.
double accuracy(const std::vector<PageProduct>& products, const std::vector<corpus::GroundTruthRecord>& truth);

/// Report for one shop over one or more runs. Decision-generation calls are
/// counted apart from all other calls.
ShopReport evaluate(const std::string& shop_id, const std::vector<RunInput>& runs,
                    const std::vector<corpus::GroundTruthRecord>& truth, const std::string& variant = "");

struct ShopComparison {
    std::string shop_id;
    std::string variant;
    double accuracy_direct = 0.0;
    double accuracy_indirect = 0.0;
    double delta_accuracy = 0.0;      ///< indirect - direct
    double calls_direct = 0.0;
    double calls_indirect = 0.0;
    double call_reduction_pct = 0.0;  ///< 100 (1 - indirect / direct); negative when indirect needs more
    llm::Money cost_direct;           ///< per run
    llm::Money cost_indirect;         ///< per run, decision calls included
    std::optional<double> cost_ratio; ///< indirect / direct
};

struct Comparison {
    std::vector<ShopComparison> shops;
};

/// Pairs shops by id and variant. Throws CorpusMismatch when the reports do
/// not cover the same shops or were computed on different corpora.
Comparison compare_strategies(const RunReport& direct, const RunReport& indirect);

enum class Format { Json, Csv, Markdown };

Format parse_format(std::string_view s);

nlohmann::json to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Comparison& c);

/// Deterministic serialization. Markdown holds an accuracy table with one
/// column per variant.
std::string emit_report(const RunReport& r, Format f);
std::string emit_comparison(const Comparison& c, Format f);
/// One row per shop, variant and run: the data behind a box plot.
std::string emit_distribution_csv(const RunReport& r);

} // namespace shopx::eval
