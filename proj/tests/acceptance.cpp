// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "similarity_table.hpp"
#include "test_support.hpp"
#include "shopx/corpus/corpus.hpp"
#include "shopx/direct/direct.hpp"
#include "shopx/eval/report.hpp"
#include "shopx/html/dom.hpp"
#include "shopx/indirect/orchestrator.hpp"
#include "shopx/llm/session.hpp"
#include "shopx/oracle/oracle.hpp"

using namespace shopx;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Failed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void expect(bool cond, const std::string& what) {
    if (!cond) throw Failed(what);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int decimals = 2) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(decimals);
    ss << v;
    return ss.str();
}

// ---- 1 -------------------------------------------------------------------------

Outcome compression_invariants() {
    const std::set<std::string> allowed = {"class", "id"};
    const std::regex tag("<[A-Za-z/!?]");
    int pages = 0, banned = 0, stray_attrs = 0, tagged_text = 0, non_monotone = 0;
    for (const auto& name : corpus::preset_names()) {
        auto c = corpus::generate_shop(corpus::preset(name, 100, 2024));
        for (const auto& page : c.pages) {
            ++pages;
            auto comp = html::compress_html(page);
            auto text = html::extract_text(comp);
            auto dom = html::parse(comp.content);
            html::for_each_node(dom.root(), [&](const html::Node& n) {
                if (!n.is_element()) return;
                banned += html::is_banned_element(n.name());
                for (const auto& a : n.attributes()) stray_attrs += !allowed.count(a.name);
            });
            tagged_text += std::regex_search(text.content, tag);
            non_monotone += !(html::count_tokens(page.html) >= comp.token_count && comp.token_count >= text.token_count);
        }
    }
    expect(pages == 300, "expected 300 pages, got " + std::to_string(pages));
    expect(banned == 0, std::to_string(banned) + " banned elements survived");
    expect(stray_attrs == 0, std::to_string(stray_attrs) + " attributes outside {class, id}");
    expect(tagged_text == 0, std::to_string(tagged_text) + " TEXT documents contain tags");
    expect(non_monotone == 0, std::to_string(non_monotone) + " pages break token monotonicity");
    return {true, "300 pages, 0 banned elements, 0 stray attributes, TEXT tag-free, tokens monotone"};
}

// ---- 2 -------------------------------------------------------------------------

Outcome similarity_equivalence() {
    using testing::kSlots;
    int cells = 0;
    for (std::size_t i = 0; i < kSlots.size(); ++i) {
        for (std::size_t j = 0; j < kSlots.size(); ++j) {
            auto pair = testing::build_pair(kSlots[i], kSlots[j]);
            auto r = similarity::compare(pair.extracted, pair.reference);
            expect(r.overall == testing::kOverall[i][j],
                   "cell " + std::to_string(i) + "," + std::to_string(j) + " scored " + fmt(r.overall, 4));
            expect(static_cast<int>(r.mismatches.size()) == testing::kMismatchCount[i][j],
                   "cell " + std::to_string(i) + "," + std::to_string(j) + " has the wrong mismatch count");
            ++cells;
        }
    }
    auto ref = testing::full_reference_product();
    double same = similarity::compare(ref, ref).overall;
    auto missing = ref;
    missing.salt.reset();
    double seven = similarity::compare(missing, ref).overall;
    auto unit = ref;
    unit.fat = schema::QuantitativeValue{31.0, "MGM"};
    double half = similarity::compare(unit, ref).overall;
    expect(same == 1.0 && seven == 0.875 && half == 0.9375,
           "worked examples gave " + fmt(same, 4) + ", " + fmt(seven, 4) + ", " + fmt(half, 4));
    return {true, std::to_string(cells) + " table cells match; worked examples 1.0, 0.875, 0.9375"};
}

// ---- 3 -------------------------------------------------------------------------

Outcome direct_correctness() {
    auto c = corpus::generate_shop(corpus::preset("alpha", 100, 7));
    oracle::OracleProvider p(c, {});
    llm::CostLedger ledger;
    llm::Gateway g(p, llm::PriceTable::defaults(), ledger);
    direct::BatchOptions opts;
    auto out = direct::extract_direct_batch(c, schema::food_product_descriptor(), g, opts);
    std::vector<eval::PageProduct> products;
    for (auto& r : out.results) products.push_back({r.page_id, r.product});
    double acc = eval::accuracy(products, c.truth);
    auto calls = ledger.count_model(opts.model_id);
    expect(out.failures.empty(), std::to_string(out.failures.size()) + " pages failed");
    expect(fmt(acc) == "100.00", "accuracy " + fmt(acc, 4));
    expect(calls == 100, std::to_string(calls) + " primary calls");
    return {true, "accuracy " + fmt(acc) + ", primary calls " + std::to_string(calls)};
}

// ---- 4 -------------------------------------------------------------------------

int indirect_primary_calls(const corpus::Corpus& c, std::uint64_t seed) {
    oracle::OracleConfig oc;
    oc.imperfections = 1;
    oracle::OracleProvider p(c, oc);
    indirect::OrchestratorConfig cfg;
    cfg.rng_seed = seed;
    auto run = indirect::process_shop(c, p, llm::PriceTable::defaults(), cfg);
    const auto& m = run.metrics;
    expect(m.llm_calls_primary_model == m.reference_extractions + m.functions_generated + m.refinements_performed,
           "primary call accounting does not add up");
    return m.llm_calls_primary_model;
}

Outcome call_reduction() {
    auto c300 = corpus::generate_shop(corpus::preset("gamma", 300, 11));
    auto c600 = corpus::generate_shop(corpus::preset("gamma", 600, 11));

    oracle::OracleProvider p(c300, {});
    llm::CostLedger ledger;
    llm::Gateway g(p, llm::PriceTable::defaults(), ledger);
    auto direct_out = direct::extract_direct_batch(c300, schema::food_product_descriptor(), g, {});
    const int direct_calls = static_cast<int>(ledger.count_model("o3-mini"));

    const int calls300 = indirect_primary_calls(c300, 5);
    const int calls600 = indirect_primary_calls(c600, 5);
    expect(direct_calls == 300, "direct made " + std::to_string(direct_calls) + " calls");
    expect(calls300 <= 0.15 * direct_calls,
           "indirect made " + std::to_string(calls300) + " calls against " + std::to_string(direct_calls));
    expect(calls600 == calls300,
           "primary calls went from " + std::to_string(calls300) + " to " + std::to_string(calls600) + " at 600 pages");
    return {true, "indirect " + std::to_string(calls300) + " vs direct " + std::to_string(direct_calls) +
                      " primary calls (" + fmt(100.0 * (1.0 - static_cast<double>(calls300) / direct_calls)) +
                      "% fewer); 600 pages: " + std::to_string(calls600) + " (delta 0)"};
}

// ---- 5 -------------------------------------------------------------------------

Outcome synthesis_budget() {
    auto c = corpus::generate_shop(corpus::preset("gamma", 150, 3));
    oracle::OracleConfig oc;
    oc.unreparable_templates = {"gamma-food"};
    indirect::OrchestratorConfig cfg;
    cfg.rng_seed = 17;
    const int budget = (1 + cfg.max_refinements) * (1 + cfg.max_alternatives);

    testing::TempDir session("acceptance-session");
    std::string recorded;
    {
        oracle::OracleProvider inner(c, oc);
        llm::RecordingProvider rec(inner, session.path());
        auto run = indirect::process_shop(c, rec, llm::PriceTable::defaults(), cfg);
        const auto& m = run.metrics;
        expect(m.max_calls_per_synthesis <= budget,
               "a synthesis used " + std::to_string(m.max_calls_per_synthesis) + " calls");
        bool kept_imperfect = false;
        for (const auto& e : run.library.entries()) {
            const auto* t = c.truth_for(e.source_page_id);
            if (t && t->template_id == "gamma-food") kept_imperfect = !e.accepted && e.reference_similarity < 1.0;
        }
        expect(kept_imperfect, "no imperfect program for the unreparable template was kept");
        expect(static_cast<int>(run.results.size()) == m.pages_total, "run did not finish every page");
        recorded = m.to_json().dump();
        std::cout.flush();
    }
    std::string replays[2];
    for (auto& r : replays) {
        llm::ReplayProvider replay(session.path());
        r = indirect::process_shop(c, replay, llm::PriceTable::defaults(), cfg).metrics.to_json().dump();
    }
    expect(replays[0] == recorded && replays[1] == recorded, "replayed metrics differ from the recorded run");
    auto m = indirect::ShopRunMetrics::from_json(json::parse(recorded));
    return {true, "max calls per synthesis " + std::to_string(m.max_calls_per_synthesis) + " <= " +
                      std::to_string(budget) + ", imperfect program kept, two replays bit-identical"};
}

// ---- 6 -------------------------------------------------------------------------

Outcome decision_ensemble() {
    auto c = corpus::generate_shop(corpus::preset("alpha", 1000, 99));
    oracle::OracleConfig oc;
    oc.decision_noise = 0.2;
    oracle::OracleProvider p(c, oc);
    indirect::OrchestratorConfig cfg;
    cfg.rng_seed = 23;
    cfg.threads = 4;
    auto run = indirect::process_shop(c, p, llm::PriceTable::defaults(), cfg);
    expect(run.ensemble.size() == 5, std::to_string(run.ensemble.size()) + " decision programs");
    expect(run.metrics.llm_calls_decision_model >= 5, "fewer than five decision generation calls");
    int agree = 0;
    std::set<std::string> negative;
    for (std::size_t i = 0; i < c.pages.size(); ++i) {
        auto text = html::extract_text(html::compress_html(c.pages[i]));
        bool d = indirect::decide(run.ensemble, text);
        agree += d == corpus::is_positive(c.truth[i]);
        if (!d) negative.insert(c.pages[i].page_id);
    }
    double acc = 100.0 * agree / static_cast<double>(c.pages.size());
    int leaked = 0;
    for (const auto& e : run.ledger.entries()) {
        if (e.role != llm::Role::DecisionGen && negative.count(e.page_id)) ++leaked;
    }
    expect(acc >= 95.0, "majority vote accuracy " + fmt(acc));
    expect(leaked == 0, std::to_string(leaked) + " primary calls for decision-negative pages");
    return {true, "5 programs, majority vote accuracy " + fmt(acc) + "% on 1000 pages, " +
                      std::to_string(negative.size()) + " negative pages with 0 primary calls"};
}

// ---- 7 -------------------------------------------------------------------------

Outcome cost_accounting() {
    auto prices = llm::PriceTable::defaults();
    auto a = prices.cost({1'000'000, 0, 0}, "o3-mini");
    auto b = prices.cost({1'000'000, 1'000'000, 0}, "gpt-4o");
    expect(a == llm::Money::from_usd_string("1.10"), "o3-mini cost " + a.usd());
    expect(b == llm::Money::from_usd_string("1.25"), "gpt-4o cost " + b.usd());

    llm::CostLedger ledger;
    llm::Money sum;
    const llm::Usage usages[] = {{1'000'000, 0, 0}, {1'000'000, 1'000'000, 0}, {123'457, 11'111, 9'876}, {1, 0, 3}};
    for (int k = 0; k < 40; ++k) {
        const auto& u = usages[k % 4];
        const std::string model = k % 2 ? "gpt-4o" : "o3-mini";
        llm::Money cost = prices.cost(u, model);
        sum += cost;
        ledger.append({"h" + std::to_string(k), model, llm::Role::Direct, "t", "p", u, false, cost});
    }
    expect(ledger.total() == sum, "ledger total " + ledger.total().usd() + " != entry sum " + sum.usd());
    return {true, "o3-mini {1M,0,0} = $" + a.usd() + ", gpt-4o {1M,1M,0} = $" + b.usd() + ", ledger total exact ($" +
                      ledger.total().usd() + ")"};
}

// ---- 8 -------------------------------------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + SHOPX_CLI_PATH + "\" " + args + " > /dev/null";
    return std::system(cmd.c_str());
}

Outcome variability_protocol() {
    testing::TempDir dir("acceptance-runs");
    const std::string corpus_dir = (dir / "corpus").string();
    expect(run_cli("--seed 5 corpus generate --preset beta --pages 200 --out \"" + corpus_dir + "\"") == 0,
           "corpus generation failed");
    const std::string noise =
        "--seed 1234 --oracle-random-imperfections 3 --oracle-decision-noise 0.3 --oracle-reference-dropout 0.3 ";
    for (const char* out : {"a", "b"}) {
        expect(run_cli(noise + "extract indirect --corpus \"" + corpus_dir + "\" --runs 10 --out \"" +
                       (dir / out).string() + "\"") == 0,
               "extract indirect failed");
    }
    json summary = json::parse(testing::read_file(dir / "a" / "summary.json"));
    expect(summary["runs"].size() == 10, "summary lists " + std::to_string(summary["runs"].size()) + " runs");
    expect(summary["master_seed"] == 1234, "master seed not recorded");
    std::set<std::uint64_t> seeds;
    for (int i = 0; i < 10; ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "run-%02d", i);
        auto pa = dir / "a" / name / "metrics.json";
        auto pb = dir / "b" / name / "metrics.json";
        expect(std::filesystem::exists(pa), std::string(name) + "/metrics.json missing");
        std::string ma = testing::read_file(pa);
        expect(ma == testing::read_file(pb), std::string(name) + " differs between reruns");
        auto seed = json::parse(ma)["seed"].get<std::uint64_t>();
        expect(seed == indirect::run_seed(1234, i) && summary["runs"][i]["seed"] == seed,
               std::string(name) + " seed not recorded");
        seeds.insert(seed);
    }
    expect(seeds.size() == 10, "run seeds are not distinct");
    std::string details;
    for (const char* key : {"accuracy", "llm_calls_primary_model"}) {
        const auto& d = summary[key];
        expect(d["min"].get<double>() <= d["mean"].get<double>() && d["mean"].get<double>() <= d["max"].get<double>(),
               std::string(key) + " distribution violates min <= mean <= max");
        details += std::string(", ") + key + " " + fmt(d["min"]) + "/" + fmt(d["mean"]) + "/" + fmt(d["max"]);
    }
    return {true, "10 metrics files, reruns bit-identical, seeds recorded" + details + " (min/mean/max)"};
}

struct Criterion {
    int id;
    const char* name;
    double limit_s; ///< 0 means no limit
    std::function<Outcome()> check;
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {1, "compression invariants", 10.0, compression_invariants},
        {2, "similarity oracle equivalence", 1.0, similarity_equivalence},
        {3, "direct-strategy correctness", 30.0, direct_correctness},
        {4, "call reduction", 120.0, call_reduction},
        {5, "synthesis budget law", 0.0, synthesis_budget},
        {6, "decision ensemble", 30.0, decision_ensemble},
        {7, "cost accounting", 0.0, cost_accounting},
        {8, "ten-run variability protocol", 0.0, variability_protocol},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, e.what()};
        }
        double s = seconds_since(t0);
        if (o.pass && c.limit_s > 0 && s >= c.limit_s) {
            o = {false, "took " + fmt(s) + " s, limit " + fmt(c.limit_s, 0) + " s"};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << " ["
                  << fmt(s) << " s]" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
