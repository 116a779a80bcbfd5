#include "shopx/llm/pricing.hpp"

#include <charconv>
#include <fstream>

#include "shopx/common/text.hpp"

namespace shopx::llm {

using nlohmann::json;

Usage& Usage::operator+=(const Usage& o) noexcept {
    input_tokens += o.input_tokens;
    cached_input_tokens += o.cached_input_tokens;
    output_tokens += o.output_tokens;
    return *this;
}

json usage_to_json(const Usage& u) {
    return {{"input_tokens", u.input_tokens},
            {"cached_input_tokens", u.cached_input_tokens},
            {"output_tokens", u.output_tokens}};
}

Usage usage_from_json(const json& j) {
    Usage u;
    u.input_tokens = j.value("input_tokens", std::int64_t{0});
    u.cached_input_tokens = j.value("cached_input_tokens", std::int64_t{0});
    u.output_tokens = j.value("output_tokens", std::int64_t{0});
    if (u.input_tokens < 0 || u.cached_input_tokens < 0 || u.output_tokens < 0 ||
        u.cached_input_tokens > u.input_tokens) {
        throw SchemaViolation("usage", "token counts must be non-negative with cached <= input");
    }
    return u;
}

Money Money::from_usd_string(std::string_view decimal) {
    std::string_view s = text::trim(decimal);
    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        negative = s[0] == '-';
        s.remove_prefix(1);
    }
    auto dot = s.find('.');
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    auto digits = [](std::string_view d) {
        for (char c : d) {
            if (c < '0' || c > '9') return false;
        }
        return true;
    };
    if (whole.empty() || !digits(whole) || !digits(frac) || frac.size() > 12 || (dot != std::string_view::npos && frac.empty())) {
        throw Error("malformed USD amount '" + std::string(decimal) + "'");
    }
    std::int64_t units = 0;
    auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), units);
    if (ec != std::errc() || units > 9'000'000) throw Error("USD amount out of range '" + std::string(decimal) + "'");
    std::int64_t value = units * 1'000'000'000'000LL;
    std::int64_t scale = 100'000'000'000LL;
    for (char c : frac) {
        value += (c - '0') * scale;
        scale /= 10;
    }
    return Money{negative ? -value : value};
}

std::string Money::usd() const {
    std::int64_t v = pico_usd < 0 ? -pico_usd : pico_usd;
    std::string frac = std::to_string(v % 1'000'000'000'000LL);
    frac.insert(0, 12 - frac.size(), '0');
    while (frac.size() > 2 && frac.back() == '0') frac.pop_back();
    return std::string(pico_usd < 0 ? "-" : "") + std::to_string(v / 1'000'000'000'000LL) + "." + frac;
}

namespace {

// "1.10" USD per 1M tokens is 1.10e-6 USD per token, i.e. 1'100'000 pico-USD.
Money per_token(std::string_view usd_per_million) {
    Money m = Money::from_usd_string(usd_per_million);
    if (m.pico_usd < 0) throw Error("negative rate '" + std::string(usd_per_million) + "'");
    if (m.pico_usd % 1'000'000 != 0) {
        throw Error("rate '" + std::string(usd_per_million) + "' has more than 6 decimals");
    }
    return Money{m.pico_usd / 1'000'000};
}

std::string rate_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    throw SchemaViolation("rate", "expected a decimal string or number");
}

} // namespace

PriceTable PriceTable::defaults() {
    PriceTable t;
    t.set("o3-mini", "1.10", "0.55", "4.40");
    t.set("gpt-4o", "2.50", "1.25", "10.00");
    return t;
}

PriceTable PriceTable::from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaViolation("", "price table must be an object");
    PriceTable t;
    for (const auto& [model, r] : doc.items()) {
        if (!r.is_object() || !r.contains("input") || !r.contains("cached_input") || !r.contains("output")) {
            throw SchemaViolation(model, "expected {input, cached_input, output}");
        }
        t.set(model, rate_text(r["input"]), rate_text(r["cached_input"]), rate_text(r["output"]));
    }
    return t;
}

PriceTable PriceTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open price table '" + path + "'");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw SchemaViolation("", "malformed JSON in '" + path + "'");
    return from_json(doc);
}

void PriceTable::set(const std::string& model_id, std::string_view input_per_1m, std::string_view cached_per_1m,
                     std::string_view output_per_1m) {
    rates_[model_id] = ModelRates{per_token(input_per_1m), per_token(cached_per_1m), per_token(output_per_1m)};
}

const ModelRates& PriceTable::rates(const std::string& model_id) const {
    auto it = rates_.find(model_id);
    if (it == rates_.end()) throw UnknownModel("no price for model '" + model_id + "'");
    return it->second;
}

Money PriceTable::cost(const Usage& usage, const std::string& model_id) const {
    const ModelRates& r = rates(model_id);
    if (usage.cached_input_tokens > usage.input_tokens || usage.cached_input_tokens < 0 || usage.output_tokens < 0) {
        throw PreconditionViolation("usage has cached > input or negative counts");
    }
    std::int64_t fresh = usage.input_tokens - usage.cached_input_tokens;
    return Money{fresh * r.input_per_token.pico_usd + usage.cached_input_tokens * r.cached_input_per_token.pico_usd +
                 usage.output_tokens * r.output_per_token.pico_usd};
}

} // namespace shopx::llm
