#pragma once

#include <string>

#include "shopx/llm/ledger.hpp"
#include "shopx/llm/pricing.hpp"
#include "shopx/llm/provider.hpp"

namespace shopx::llm {

struct StructuredResult {
    std::string json_text;
    Usage usage; ///< summed over every call made for this request
    int calls = 0;
};

/// Schema-constrained completions with cost accounting. Every provider call is
/// appended to the ledger, including the corrective retry.
class Gateway {
public:
    Gateway(Provider& provider, PriceTable prices, CostLedger& ledger)
        : provider_(provider), prices_(std::move(prices)), ledger_(ledger) {}

    /// Validates the response against req.schema. On a violation the request
    /// is repeated once with a corrective instruction appended; a second
    /// violation throws SchemaViolation.
    StructuredResult complete_structured(const CompletionRequest& req, Role role);

    const PriceTable& prices() const noexcept { return prices_; }
    CostLedger& ledger() noexcept { return ledger_; }
    Provider& provider() noexcept { return provider_; }

private:
    Provider& provider_;
    PriceTable prices_;
    CostLedger& ledger_;
};

} // namespace shopx::llm
