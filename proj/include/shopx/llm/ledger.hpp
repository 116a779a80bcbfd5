#pragma once

#include <cstddef>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "shopx/llm/pricing.hpp"

namespace shopx::llm {

enum class Role { Direct, Reference, DecisionGen, FuncGen, Refine };

std::string_view to_string(Role r) noexcept;
Role parse_role(std::string_view s);

struct LedgerEntry {
    std::string exchange_ref; ///< content hash of the request
    std::string model_id;
    Role role = Role::Direct;
    std::string prompt_template; ///< "id@version#hash"
    std::string page_id;         ///< page the call was made for, if any
    Usage usage;
    bool usage_estimated = false;
    Money cost;

    bool operator==(const LedgerEntry&) const = default;
};

/// Append-only and safe to share between threads.
class CostLedger {
public:
    CostLedger() = default;
    CostLedger(const CostLedger& other);
    CostLedger& operator=(const CostLedger& other);

    void append(LedgerEntry e);
    void append_all(const CostLedger& other);

    std::vector<LedgerEntry> entries() const;
    std::size_t size() const;
    Money total() const;
    std::size_t count(Role r) const;
    std::size_t count_model(std::string_view model_id) const;
    Usage usage_total() const;

    nlohmann::json to_json() const;
    static CostLedger from_json(const nlohmann::json& doc);

private:
    mutable std::mutex mutex_;
    std::vector<LedgerEntry> entries_;
};

} // namespace shopx::llm
