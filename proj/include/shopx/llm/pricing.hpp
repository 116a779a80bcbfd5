#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "json.hpp"
#include "shopx/common/error.hpp"

namespace shopx::llm {

struct Usage {
    std::int64_t input_tokens = 0;
    std::int64_t cached_input_tokens = 0;
    std::int64_t output_tokens = 0;

    Usage& operator+=(const Usage& o) noexcept;
    bool operator==(const Usage&) const = default;
};

nlohmann::json usage_to_json(const Usage& u);
Usage usage_from_json(const nlohmann::json& j);

/// US dollars in fixed point: one unit is 1e-12 USD. Per-token prices of the
/// form "x.yz USD per 1M tokens" are whole numbers in this unit, so costs and
/// sums are exact.
struct Money {
    std::int64_t pico_usd = 0;

    static Money from_usd_string(std::string_view decimal);
    std::string usd() const;

    Money& operator+=(Money o) noexcept {
        pico_usd += o.pico_usd;
        return *this;
    }
    friend Money operator+(Money a, Money b) noexcept { return a += b; }
    auto operator<=>(const Money&) const = default;
};

struct ModelRates {
    Money input_per_token;
    Money cached_input_per_token;
    Money output_per_token;
};

class UnknownModel : public Error {
public:
    using Error::Error;
};

class PriceTable {
public:
    /// o3-mini 1.10 / 0.55 / 4.40 and gpt-4o 2.50 / 1.25 / 10.00 USD per 1M tokens.
    static PriceTable defaults();
    /// {"o3-mini": {"input": "1.10", "cached_input": "0.55", "output": "4.40"}, ...};
    /// rates may be JSON strings or numbers, in USD per 1M tokens.
    static PriceTable from_json(const nlohmann::json& doc);
    static PriceTable load(const std::string& path);

    void set(const std::string& model_id, std::string_view input_per_1m, std::string_view cached_per_1m,
             std::string_view output_per_1m);
    bool contains(const std::string& model_id) const { return rates_.count(model_id) != 0; }
    const ModelRates& rates(const std::string& model_id) const;

    /// (input - cached) * rate_in + cached * rate_cached + output * rate_out.
    Money cost(const Usage& usage, const std::string& model_id) const;

private:
    std::map<std::string, ModelRates> rates_;
};

} // namespace shopx::llm
