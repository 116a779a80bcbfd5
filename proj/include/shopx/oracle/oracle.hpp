#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>

#include "json.hpp"
#include "shopx/corpus/corpus.hpp"
#include "shopx/llm/provider.hpp"

namespace shopx::oracle {

/// Behaviour knobs of the oracle. Every random choice is a pure function of
/// `seed` and the request content, so answers do not depend on call order.
struct OracleConfig {
    int imperfections = 1;            ///< broken rules per generated program
    int max_random_imperfections = 0; ///< when > 0, draw 0..max broken rules instead
    double decision_noise = 0.0;      ///< chance that a decision program is sloppy
    double reference_dropout = 0.0;   ///< chance that a direct answer omits one attribute
    std::set<std::string> unreparable_templates; ///< refinements never fix these
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static OracleConfig from_json(const nlohmann::json& j);
};

/// Test stand-in for a language model that answers from the synthetic
/// corpus' ground truth. Pages are recognised by the content of the prompt's
/// PAGE section, never by bookkeeping fields.
class OracleProvider : public llm::Provider {
public:
    OracleProvider(const corpus::Corpus& corpus, OracleConfig cfg);
    ~OracleProvider() override;

    llm::CompletionResponse complete(const llm::CompletionRequest& req) override;
    std::string name() const override { return "oracle"; }

    const OracleConfig& config() const noexcept { return cfg_; }

private:
    struct Index;
    OracleConfig cfg_;
    std::unique_ptr<Index> index_;
};

} // namespace shopx::oracle
