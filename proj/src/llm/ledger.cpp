#include "shopx/llm/ledger.hpp"

namespace shopx::llm {

using nlohmann::json;

std::string_view to_string(Role r) noexcept {
    switch (r) {
    case Role::Direct: return "direct";
    case Role::Reference: return "reference";
    case Role::DecisionGen: return "decision_gen";
    case Role::FuncGen: return "func_gen";
    case Role::Refine: return "refine";
    }
    return "";
}

Role parse_role(std::string_view s) {
    for (Role r : {Role::Direct, Role::Reference, Role::DecisionGen, Role::FuncGen, Role::Refine}) {
        if (to_string(r) == s) return r;
    }
    throw Error("unknown role tag '" + std::string(s) + "'");
}

CostLedger::CostLedger(const CostLedger& other) : entries_(other.entries()) {}

CostLedger& CostLedger::operator=(const CostLedger& other) {
    if (this != &other) {
        auto copy = other.entries();
        std::lock_guard lock(mutex_);
        entries_ = std::move(copy);
    }
    return *this;
}

void CostLedger::append(LedgerEntry e) {
    std::lock_guard lock(mutex_);
    entries_.push_back(std::move(e));
}

void CostLedger::append_all(const CostLedger& other) {
    auto copy = other.entries();
    std::lock_guard lock(mutex_);
    for (auto& e : copy) entries_.push_back(std::move(e));
}

std::vector<LedgerEntry> CostLedger::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::size_t CostLedger::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

Money CostLedger::total() const {
    std::lock_guard lock(mutex_);
    Money sum;
    for (const auto& e : entries_) sum += e.cost;
    return sum;
}

std::size_t CostLedger::count(Role r) const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.role == r ? 1 : 0;
    return n;
}

std::size_t CostLedger::count_model(std::string_view model_id) const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.model_id == model_id ? 1 : 0;
    return n;
}

Usage CostLedger::usage_total() const {
    std::lock_guard lock(mutex_);
    Usage u;
    for (const auto& e : entries_) u += e.usage;
    return u;
}

json CostLedger::to_json() const {
    auto list = entries();
    json items = json::array();
    Money sum;
    for (const auto& e : list) {
        sum += e.cost;
        items.push_back({{"exchange_ref", e.exchange_ref},
                         {"model_id", e.model_id},
                         {"role", to_string(e.role)},
                         {"prompt_template", e.prompt_template},
                         {"page_id", e.page_id},
                         {"usage", usage_to_json(e.usage)},
                         {"usage_estimated", e.usage_estimated},
                         {"cost_pico_usd", e.cost.pico_usd},
                         {"cost_usd", e.cost.usd()}});
    }
    return {{"entries", std::move(items)}, {"total_pico_usd", sum.pico_usd}, {"total_usd", sum.usd()}};
}

CostLedger CostLedger::from_json(const json& doc) {
    CostLedger ledger;
    for (const auto& j : doc.at("entries")) {
        LedgerEntry e;
        e.exchange_ref = j.at("exchange_ref").get<std::string>();
        e.model_id = j.at("model_id").get<std::string>();
        e.role = parse_role(j.at("role").get<std::string>());
        e.prompt_template = j.value("prompt_template", std::string());
        e.page_id = j.value("page_id", std::string());
        e.usage = usage_from_json(j.at("usage"));
        e.usage_estimated = j.value("usage_estimated", false);
        e.cost = Money{j.at("cost_pico_usd").get<std::int64_t>()};
        ledger.entries_.push_back(std::move(e));
    }
    if (doc.contains("total_pico_usd") && doc["total_pico_usd"].get<std::int64_t>() != ledger.total().pico_usd) {
        throw SchemaViolation("total_pico_usd", "does not equal the sum of entries");
    }
    return ledger;
}

} // namespace shopx::llm
