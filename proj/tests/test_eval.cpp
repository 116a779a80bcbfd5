#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "shopx/corpus/corpus.hpp"
#include "shopx/eval/report.hpp"
#include "shopx/similarity/similarity.hpp"

using namespace shopx;
using namespace shopx::eval;
using nlohmann::json;

namespace {

std::vector<PageProduct> perfect(const corpus::Corpus& c) {
    std::vector<PageProduct> out;
    for (const auto& t : c.truth) out.push_back({t.page_id, t.product});
    return out;
}

std::vector<corpus::GroundTruthRecord> full_truth(const corpus::Corpus& c) {
    std::vector<corpus::GroundTruthRecord> out;
    for (const auto& t : c.truth) {
        if (schema::populated_count(t.product) == 8) out.push_back(t);
    }
    return out;
}

llm::CostLedger ledger_of(int primary, int decision) {
    llm::CostLedger l;
    auto prices = llm::PriceTable::defaults();
    for (int i = 0; i < primary; ++i) {
        llm::Usage u{1000, 0, 100};
        l.append({"h", "o3-mini", llm::Role::Direct, "t", "p", u, false, prices.cost(u, "o3-mini")});
    }
    for (int i = 0; i < decision; ++i) {
        llm::Usage u{1000, 0, 100};
        l.append({"h", "gpt-4o", llm::Role::DecisionGen, "t", "", u, false, prices.cost(u, "gpt-4o")});
    }
    return l;
}

} // namespace

TEST_CASE("accuracy is 100 for perfect results and 98.75 with one 0.875 page in ten") {
    auto c = corpus::generate_shop(corpus::preset("alpha", 60, 2));
    CHECK(accuracy(perfect(c), c.truth) == 100.0);

    auto truth = full_truth(c);
    truth.resize(10);
    std::vector<PageProduct> got;
    for (const auto& t : truth) got.push_back({t.page_id, t.product});
    got[4].product.fat.reset();
    CHECK(accuracy(got, truth) == doctest::Approx(98.75));
}

TEST_CASE("accuracy ignores page order and needs truth for every result") {
    auto c = corpus::generate_shop(corpus::preset("gamma", 80, 2));
    auto got = perfect(c);
    for (std::size_t i = 0; i < got.size(); i += 3) got[i].product.salt.reset();
    double a = accuracy(got, c.truth);
    std::mt19937 rng(1);
    std::shuffle(got.begin(), got.end(), rng);
    auto truth = c.truth;
    std::shuffle(truth.begin(), truth.end(), rng);
    CHECK(accuracy(got, truth) == a);

    got.push_back({"ghost", {}});
    CHECK_THROWS_AS(accuracy(got, c.truth), MissingTruth);
}

TEST_CASE("missing results count as empty products") {
    auto c = corpus::generate_shop(corpus::preset("alpha", 20, 2));
    auto got = perfect(c);
    got.erase(got.begin());
    double expected = 100.0 * (19.0 + similarity::compare({}, c.truth[0].product).overall) / 20.0;
    CHECK(accuracy(got, c.truth) == doctest::Approx(expected));
}

TEST_CASE("distribution stats") {
    auto d = DistributionStats::of({90.0, 95.0, 100.0, 95.0});
    CHECK(d.n == 4);
    CHECK(d.min == 90.0);
    CHECK(d.max == 100.0);
    CHECK(d.mean == 95.0);
    CHECK(d.stddev == doctest::Approx(std::sqrt(12.5)));
    auto same = DistributionStats::of(std::vector<double>(10, 0.1));
    CHECK(same.min <= same.mean);
    CHECK(same.mean <= same.max);
    CHECK(same.stddev == doctest::Approx(0.0));
    CHECK(DistributionStats::of({}).n == 0);
}

TEST_CASE("evaluate reconciles calls and costs with the ledgers") {
    auto c = corpus::generate_shop(corpus::preset("alpha", 20, 2));
    std::vector<RunInput> runs(2);
    runs[0] = {perfect(c), ledger_of(40, 5)};
    runs[1] = {perfect(c), ledger_of(50, 5)};
    runs[1].products[0].product = {};
    auto r = evaluate(c.shop_id, runs, c.truth);
    CHECK(r.runs == 2);
    CHECK(r.calls_primary == 45.0);
    CHECK(r.calls_decision == 5.0);
    CHECK(r.calls_by_role.at("direct") == 45.0);
    CHECK(r.cost_total == runs[0].ledger.total() + runs[1].ledger.total());
    CHECK(r.accuracy_runs[0] == 100.0);
    CHECK(r.accuracy_runs[1] < 100.0);
    CHECK(r.accuracy == doctest::Approx((r.accuracy_runs[0] + r.accuracy_runs[1]) / 2));
    CHECK_THROWS_AS(evaluate(c.shop_id, {}, c.truth), PreconditionViolation);
}

TEST_CASE("strategy comparison") {
    auto c = corpus::generate_shop(corpus::preset("alpha", 20, 2));
    RunReport direct{Strategy::Direct, {evaluate(c.shop_id, {{perfect(c), ledger_of(1000, 0)}}, c.truth)}};

    SUBCASE("identical reports show no change") {
        auto cmp = compare_strategies(direct, direct);
        REQUIRE(cmp.shops.size() == 1);
        CHECK(cmp.shops[0].delta_accuracy == 0.0);
        CHECK(cmp.shops[0].call_reduction_pct == 0.0);
        CHECK(*cmp.shops[0].cost_ratio == 1.0);
    }
    SUBCASE("44.18 mean calls against 1000") {
        RunReport indirect = direct;
        indirect.strategy = Strategy::Indirect;
        indirect.shops[0].calls_primary = 44.18;
        auto cmp = compare_strategies(direct, indirect);
        CHECK(cmp.shops[0].call_reduction_pct == doctest::Approx(95.582));
    }
    SUBCASE("more indirect calls give a negative reduction") {
        RunReport indirect{Strategy::Indirect, {evaluate(c.shop_id, {{perfect(c), ledger_of(1500, 5)}}, c.truth)}};
        CHECK(compare_strategies(direct, indirect).shops[0].call_reduction_pct == doctest::Approx(-50.0));
    }
    SUBCASE("different corpora are rejected") {
        auto other = corpus::generate_shop(corpus::preset("alpha", 20, 3));
        RunReport indirect{Strategy::Indirect, {evaluate(c.shop_id, {{perfect(other), ledger_of(10, 5)}}, other.truth)}};
        CHECK_THROWS_AS(compare_strategies(direct, indirect), CorpusMismatch);
        CHECK_THROWS_AS(compare_strategies(direct, RunReport{Strategy::Indirect, {}}), CorpusMismatch);
    }
}

TEST_CASE("reports serialize deterministically") {
    auto a = corpus::generate_shop(corpus::preset("alpha", 20, 2));
    auto b = corpus::generate_shop(corpus::preset("beta", 20, 2));
    RunReport r{Strategy::Direct,
                {evaluate(a.shop_id, {{perfect(a), ledger_of(20, 0)}}, a.truth, "html_compressed"),
                 evaluate(a.shop_id, {{perfect(a), ledger_of(20, 0)}}, a.truth, "text"),
                 evaluate(b.shop_id, {{perfect(b), ledger_of(20, 0)}}, b.truth, "html_compressed"),
                 evaluate(b.shop_id, {{perfect(b), ledger_of(20, 0)}}, b.truth, "text")}};
    auto j = emit_report(r, Format::Json);
    CHECK(report_from_json(json::parse(j)) == r);
    CHECK(emit_report(report_from_json(json::parse(j)), Format::Json) == j);

    auto csv = emit_report(r, Format::Csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

    auto md = emit_report(r, Format::Markdown);
    CHECK(md.find("| Shop | HTML_COMPRESSED | TEXT |") != std::string::npos);
    CHECK(md.find("| alpha | 100.00 | 100.00 |") != std::string::npos);
    CHECK(emit_report(r, Format::Markdown) == md);

    auto dist = emit_distribution_csv(r);
    CHECK(dist.rfind("shop_id,variant,run,accuracy\n", 0) == 0);
    CHECK_THROWS_AS(parse_format("pdf"), PreconditionViolation);
}
