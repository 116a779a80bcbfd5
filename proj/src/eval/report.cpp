#include "shopx/eval/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "shopx/common/hash.hpp"
#include "shopx/similarity/similarity.hpp"

namespace shopx::eval {

using nlohmann::json;

std::string_view to_string(Strategy s) noexcept { return s == Strategy::Direct ? "direct" : "indirect"; }

Strategy parse_strategy(std::string_view s) {
    if (s == "direct") return Strategy::Direct;
    if (s == "indirect") return Strategy::Indirect;
    throw PreconditionViolation("unknown strategy '" + std::string(s) + "'");
}

Format parse_format(std::string_view s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    if (s == "markdown" || s == "md") return Format::Markdown;
    throw PreconditionViolation("unknown report format '" + std::string(s) + "'");
}

DistributionStats DistributionStats::of(const std::vector<double>& xs) {
    DistributionStats d;
    d.n = xs.size();
    if (xs.empty()) return d;
    auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    d.min = *lo;
    d.max = *hi;
    double sum = 0.0;
    for (double x : xs) sum += x;
    d.mean = sum / static_cast<double>(xs.size());
    double sq = 0.0;
    for (double x : xs) sq += (x - d.mean) * (x - d.mean);
    d.stddev = std::sqrt(sq / static_cast<double>(xs.size()));
    // Rounding can push the mean of equal values a hair outside [min, max].
    d.mean = std::clamp(d.mean, d.min, d.max);
    return d;
}

double RunReport::mean_accuracy() const {
    if (shops.empty()) return 0.0;
    double s = 0.0;
    for (const auto& x : shops) s += x.accuracy;
    return s / static_cast<double>(shops.size());
}

double RunReport::page_weighted_accuracy() const {
    double s = 0.0;
    long long n = 0;
    for (const auto& x : shops) {
        s += x.accuracy * x.pages;
        n += x.pages;
    }
    return n == 0 ? 0.0 : s / static_cast<double>(n);
}

std::string corpus_fingerprint(const std::vector<corpus::GroundTruthRecord>& truth) {
    std::vector<const corpus::GroundTruthRecord*> sorted;
    for (const auto& r : truth) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->page_id < b->page_id; });
    std::string data;
    for (auto* r : sorted) {
        data += r->page_id;
        data += '\t';
        data += schema::serialize_product(r->product);
        data += '\n';
    }
    return sha256_hex(data);
}

double accuracy(const std::vector<PageProduct>& products, const std::vector<corpus::GroundTruthRecord>& truth) {
    if (truth.empty()) return 0.0;
    std::unordered_map<std::string, const schema::FoodProduct*> got;
    for (const auto& p : products) got[p.page_id] = &p.product;
    std::set<std::string> known;
    for (const auto& t : truth) known.insert(t.page_id);
    for (const auto& [id, _] : got) {
        if (!known.count(id)) throw MissingTruth("no truth record for page " + id);
    }
    // Sum in page-id order so the result does not depend on input order.
    std::vector<const corpus::GroundTruthRecord*> sorted;
    for (const auto& t : truth) sorted.push_back(&t);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->page_id < b->page_id; });
    const schema::FoodProduct empty;
    double sum = 0.0;
    for (auto* t : sorted) {
        auto it = got.find(t->page_id);
        sum += similarity::compare(it == got.end() ? empty : *it->second, t->product).overall;
    }
    return 100.0 * sum / static_cast<double>(truth.size());
}

ShopReport evaluate(const std::string& shop_id, const std::vector<RunInput>& runs,
                    const std::vector<corpus::GroundTruthRecord>& truth, const std::string& variant) {
    if (runs.empty()) throw PreconditionViolation("evaluate needs at least one run");
    ShopReport r;
    r.shop_id = shop_id;
    r.variant = variant;
    r.corpus_fingerprint = corpus_fingerprint(truth);
    r.pages = static_cast<int>(truth.size());
    r.runs = static_cast<int>(runs.size());
    for (const auto& run : runs) {
        r.accuracy_runs.push_back(accuracy(run.products, truth));
        for (const auto& e : run.ledger.entries()) {
            (e.role == llm::Role::DecisionGen ? r.calls_decision : r.calls_primary) += 1.0;
            r.calls_by_role[std::string(llm::to_string(e.role))] += 1.0;
        }
        r.cost_total += run.ledger.total();
    }
    const double n = static_cast<double>(runs.size());
    r.calls_primary /= n;
    r.calls_decision /= n;
    for (auto& [_, v] : r.calls_by_role) v /= n;
    r.accuracy_distribution = DistributionStats::of(r.accuracy_runs);
    r.accuracy = r.accuracy_distribution.mean;
    return r;
}

namespace {

llm::Money per_run(const ShopReport& s) { return {s.runs == 0 ? 0 : s.cost_total.pico_usd / s.runs}; }

} // namespace

Comparison compare_strategies(const RunReport& direct, const RunReport& indirect) {
    std::map<std::pair<std::string, std::string>, const ShopReport*> ind;
    for (const auto& s : indirect.shops) {
        if (!ind.emplace(std::pair{s.shop_id, s.variant}, &s).second) {
            throw CorpusMismatch("indirect report lists shop " + s.shop_id + " twice");
        }
    }
    std::set<const ShopReport*> used;
    Comparison out;
    for (const auto& d : direct.shops) {
        // An indirect entry without a variant pairs with every direct variant.
        auto it = ind.find({d.shop_id, d.variant});
        if (it == ind.end()) it = ind.find({d.shop_id, ""});
        if (it == ind.end()) throw CorpusMismatch("shop " + d.shop_id + " is missing from the indirect report");
        const ShopReport& i = *it->second;
        used.insert(&i);
        if (d.corpus_fingerprint != i.corpus_fingerprint || d.pages != i.pages) {
            throw CorpusMismatch("shop " + d.shop_id + " was evaluated on different corpora");
        }
        ShopComparison c;
        c.shop_id = d.shop_id;
        c.variant = d.variant;
        c.accuracy_direct = d.accuracy;
        c.accuracy_indirect = i.accuracy;
        c.delta_accuracy = i.accuracy - d.accuracy;
        c.calls_direct = d.calls_primary;
        c.calls_indirect = i.calls_primary;
        c.call_reduction_pct = d.calls_primary == 0.0 ? 0.0 : 100.0 * (1.0 - i.calls_primary / d.calls_primary);
        c.cost_direct = per_run(d);
        c.cost_indirect = per_run(i);
        if (c.cost_direct.pico_usd != 0) {
            c.cost_ratio = static_cast<double>(c.cost_indirect.pico_usd) / static_cast<double>(c.cost_direct.pico_usd);
        }
        out.shops.push_back(std::move(c));
    }
    if (used.size() != ind.size()) throw CorpusMismatch("the indirect report covers shops the direct one does not");
    return out;
}

namespace {

json stats_json(const DistributionStats& d) {
    return {{"n", d.n}, {"min", d.min}, {"max", d.max}, {"mean", d.mean}, {"stddev", d.stddev}};
}

DistributionStats stats_from(const json& j) {
    return {j.at("n").get<std::size_t>(), j.at("min").get<double>(), j.at("max").get<double>(),
            j.at("mean").get<double>(), j.at("stddev").get<double>()};
}

std::string fixed(double v, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string variant_heading(const std::string& v) {
    if (v.empty()) return "Accuracy";
    std::string up = v;
    for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return up;
}

} // namespace

json to_json(const RunReport& r) {
    json shops = json::array();
    for (const auto& s : r.shops) {
        shops.push_back({{"shop_id", s.shop_id},
                         {"variant", s.variant},
                         {"corpus_fingerprint", s.corpus_fingerprint},
                         {"pages", s.pages},
                         {"runs", s.runs},
                         {"accuracy", s.accuracy},
                         {"accuracy_runs", s.accuracy_runs},
                         {"accuracy_distribution", stats_json(s.accuracy_distribution)},
                         {"calls_primary", s.calls_primary},
                         {"calls_decision", s.calls_decision},
                         {"calls_by_role", s.calls_by_role},
                         {"cost_total_usd", s.cost_total.usd()}});
    }
    return {{"strategy", to_string(r.strategy)},
            {"shops", shops},
            {"mean_accuracy", r.mean_accuracy()},
            {"page_weighted_accuracy", r.page_weighted_accuracy()}};
}

RunReport report_from_json(const json& j) {
    RunReport r;
    try {
        r.strategy = parse_strategy(j.at("strategy").get<std::string>());
        for (const auto& s : j.at("shops")) {
            ShopReport x;
            x.shop_id = s.at("shop_id").get<std::string>();
            x.variant = s.value("variant", "");
            x.corpus_fingerprint = s.at("corpus_fingerprint").get<std::string>();
            x.pages = s.at("pages").get<int>();
            x.runs = s.at("runs").get<int>();
            x.accuracy = s.at("accuracy").get<double>();
            x.accuracy_runs = s.at("accuracy_runs").get<std::vector<double>>();
            x.accuracy_distribution = stats_from(s.at("accuracy_distribution"));
            x.calls_primary = s.at("calls_primary").get<double>();
            x.calls_decision = s.at("calls_decision").get<double>();
            x.calls_by_role = s.at("calls_by_role").get<std::map<std::string, double>>();
            x.cost_total = llm::Money::from_usd_string(s.at("cost_total_usd").get<std::string>());
            r.shops.push_back(std::move(x));
        }
    } catch (const json::exception& e) {
        throw SchemaViolation("report", e.what());
    }
    return r;
}

json to_json(const Comparison& c) {
    json shops = json::array();
    for (const auto& s : c.shops) {
        shops.push_back({{"shop_id", s.shop_id},
                         {"variant", s.variant},
                         {"accuracy_direct", s.accuracy_direct},
                         {"accuracy_indirect", s.accuracy_indirect},
                         {"delta_accuracy", s.delta_accuracy},
                         {"calls_direct", s.calls_direct},
                         {"calls_indirect", s.calls_indirect},
                         {"call_reduction_pct", s.call_reduction_pct},
                         {"cost_direct_usd", s.cost_direct.usd()},
                         {"cost_indirect_usd", s.cost_indirect.usd()},
                         {"cost_ratio", s.cost_ratio ? json(*s.cost_ratio) : json(nullptr)}});
    }
    return {{"shops", shops}};
}

std::string emit_report(const RunReport& r, Format f) {
    if (f == Format::Json) return to_json(r).dump(2) + "\n";
    if (f == Format::Csv) {
        std::string out = "strategy,shop_id,variant,pages,runs,accuracy,accuracy_min,accuracy_max,accuracy_stddev,"
                          "calls_primary,calls_decision,cost_total_usd\n";
        for (const auto& s : r.shops) {
            const auto& d = s.accuracy_distribution;
            out += std::string(to_string(r.strategy)) + "," + csv_field(s.shop_id) + "," + csv_field(s.variant) + "," +
                   std::to_string(s.pages) + "," + std::to_string(s.runs) + "," + fixed(s.accuracy) + "," +
                   fixed(d.min) + "," + fixed(d.max) + "," + fixed(d.stddev) + "," + fixed(s.calls_primary) + "," +
                   fixed(s.calls_decision) + "," + s.cost_total.usd() + "\n";
        }
        return out;
    }

    // Shops as rows, variants as columns.
    std::vector<std::string> variants;
    std::vector<std::string> shop_ids;
    std::map<std::pair<std::string, std::string>, const ShopReport*> cell;
    for (const auto& s : r.shops) {
        if (std::find(variants.begin(), variants.end(), s.variant) == variants.end()) variants.push_back(s.variant);
        if (std::find(shop_ids.begin(), shop_ids.end(), s.shop_id) == shop_ids.end()) shop_ids.push_back(s.shop_id);
        cell[{s.shop_id, s.variant}] = &s;
    }
    std::sort(variants.begin(), variants.end());
    std::string out = "## Accuracy (" + std::string(to_string(r.strategy)) + ")\n\n| Shop |";
    for (const auto& v : variants) out += " " + variant_heading(v) + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < variants.size(); ++i) out += "---:|";
    out += "\n";
    for (const auto& id : shop_ids) {
        out += "| " + id + " |";
        for (const auto& v : variants) {
            auto it = cell.find({id, v});
            out += " " + (it == cell.end() ? std::string("-") : fixed(it->second->accuracy)) + " |";
        }
        out += "\n";
    }
    out += "\nMean over shops: " + fixed(r.mean_accuracy()) + ", over pages: " + fixed(r.page_weighted_accuracy()) + "\n";

    out += "\n## Calls and cost\n\n| Shop | Variant | Runs | Primary calls | Decision calls | Accuracy min | "
           "Accuracy max | Accuracy stddev | Cost (USD) |\n|---|---|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& s : r.shops) {
        const auto& d = s.accuracy_distribution;
        out += "| " + s.shop_id + " | " + (s.variant.empty() ? "-" : s.variant) + " | " + std::to_string(s.runs) + " | " +
               fixed(s.calls_primary) + " | " + fixed(s.calls_decision) + " | " + fixed(d.min) + " | " + fixed(d.max) +
               " | " + fixed(d.stddev) + " | " + s.cost_total.usd() + " |\n";
    }
    return out;
}

std::string emit_comparison(const Comparison& c, Format f) {
    if (f == Format::Json) return to_json(c).dump(2) + "\n";
    auto ratio = [](const ShopComparison& s) { return s.cost_ratio ? fixed(*s.cost_ratio, 4) : std::string(); };
    if (f == Format::Csv) {
        std::string out = "shop_id,variant,accuracy_direct,accuracy_indirect,delta_accuracy,calls_direct,"
                          "calls_indirect,call_reduction_pct,cost_direct_usd,cost_indirect_usd,cost_ratio\n";
        for (const auto& s : c.shops) {
            out += csv_field(s.shop_id) + "," + csv_field(s.variant) + "," + fixed(s.accuracy_direct) + "," +
                   fixed(s.accuracy_indirect) + "," + fixed(s.delta_accuracy) + "," + fixed(s.calls_direct) + "," +
                   fixed(s.calls_indirect) + "," + fixed(s.call_reduction_pct) + "," + s.cost_direct.usd() + "," +
                   s.cost_indirect.usd() + "," + ratio(s) + "\n";
        }
        return out;
    }
    std::string out = "| Shop | Variant | Direct | Indirect | Delta | Direct calls | Indirect calls | Reduction % | "
                      "Cost ratio |\n|---|---|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& s : c.shops) {
        out += "| " + s.shop_id + " | " + (s.variant.empty() ? "-" : s.variant) + " | " + fixed(s.accuracy_direct) +
               " | " + fixed(s.accuracy_indirect) + " | " + fixed(s.delta_accuracy) + " | " + fixed(s.calls_direct) +
               " | " + fixed(s.calls_indirect) + " | " + fixed(s.call_reduction_pct) + " | " +
               (s.cost_ratio ? ratio(s) : "-") + " |\n";
    }
    return out;
}

std::string emit_distribution_csv(const RunReport& r) {
    std::string out = "shop_id,variant,run,accuracy\n";
    for (const auto& s : r.shops) {
        for (std::size_t i = 0; i < s.accuracy_runs.size(); ++i) {
            out += csv_field(s.shop_id) + "," + csv_field(s.variant) + "," + std::to_string(i) + "," +
                   fixed(s.accuracy_runs[i], 4) + "\n";
        }
    }
    return out;
}

} // namespace shopx::eval
