#include <atomic>

#include "doctest.h"
#include "test_support.hpp"
#include "shopx/corpus/corpus.hpp"
#include "shopx/direct/direct.hpp"
#include "shopx/oracle/oracle.hpp"
#include "shopx/similarity/similarity.hpp"

using namespace shopx;
using nlohmann::json;

namespace {

// Fails every call made for one page.
class FailingFor : public llm::Provider {
public:
    FailingFor(llm::Provider& inner, std::string page_id) : inner_(inner), page_id_(std::move(page_id)) {}
    llm::CompletionResponse complete(const llm::CompletionRequest& req) override {
        if (req.page_id == page_id_) throw llm::TransportError("connection reset");
        return inner_.complete(req);
    }
    std::string name() const override { return "failing"; }

private:
    llm::Provider& inner_;
    std::string page_id_;
};

// Answers with something that never matches the schema.
class Garbage : public llm::Provider {
public:
    llm::CompletionResponse complete(const llm::CompletionRequest&) override {
        ++calls;
        return {R"({"fat": "lots"})", std::nullopt};
    }
    std::string name() const override { return "garbage"; }
    std::atomic<int> calls{0};
};

} // namespace

TEST_CASE("oracle direct extraction on alpha is exact with one call per page") {
    auto c = corpus::generate_shop(corpus::preset("alpha", 100, 7));
    oracle::OracleProvider p(c, {});
    llm::CostLedger ledger;
    llm::Gateway g(p, llm::PriceTable::defaults(), ledger);
    auto out = direct::extract_direct_batch(c, schema::food_product_descriptor(), g, {});
    REQUIRE(out.results.size() == 100);
    CHECK(out.failures.empty());
    double sum = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        CHECK(out.results[i].page_id == c.pages[i].page_id);
        sum += similarity::compare(out.results[i].product, c.truth[i].product).overall;
    }
    CHECK(sum / 100 == 1.0);
    CHECK(ledger.size() == 100);
    CHECK(ledger.count(llm::Role::Direct) == 100);
    CHECK(ledger.count_model("o3-mini") == 100);
}

TEST_CASE("a page without ingredients yields no ingredient statement") {
    auto c = corpus::generate_shop(corpus::preset("gamma", 60, 4));
    oracle::OracleProvider p(c, {});
    llm::CostLedger ledger;
    llm::Gateway g(p, llm::PriceTable::defaults(), ledger);
    std::size_t i = 0;
    while (c.truth[i].has_ingredients) ++i;
    auto r = direct::extract_direct(html::compress_html(c.pages[i]), schema::food_product_descriptor(), g, "o3-mini");
    CHECK_FALSE(r.product.ingredient_statement);
    CHECK(r.calls == 1);
}

TEST_CASE("an empty TEXT document yields an empty product") {
    auto c = corpus::generate_shop(corpus::preset("alpha", 5, 1));
    oracle::OracleProvider p(c, {});
    llm::CostLedger ledger;
    llm::Gateway g(p, llm::PriceTable::defaults(), ledger);
    html::CompressedDocument empty{"blank", html::Variant::Text, "", 0};
    auto r = direct::extract_direct(empty, schema::food_product_descriptor(), g, "o3-mini");
    CHECK(schema::populated_count(r.product) == 0);
    CHECK(r.variant_used == html::Variant::Text);
}

TEST_CASE("schema violations after the corrective retry become ExtractionFailed") {
    Garbage p;
    llm::CostLedger ledger;
    llm::Gateway g(p, llm::PriceTable::defaults(), ledger);
    html::CompressedDocument doc{"p1", html::Variant::Text, "Fett 3 g", 2};
    CHECK_THROWS_AS(direct::extract_direct(doc, schema::food_product_descriptor(), g, "o3-mini"),
                    direct::ExtractionFailed);
    CHECK(p.calls == 2);
    CHECK(ledger.size() == 2);
}

TEST_CASE("unknown models are rejected before any page is processed") {
    auto c = corpus::generate_shop(corpus::preset("alpha", 5, 1));
    oracle::OracleProvider p(c, {});
    llm::CostLedger ledger;
    llm::Gateway g(p, llm::PriceTable::defaults(), ledger);
    direct::BatchOptions opts;
    opts.model_id = "gpt-17";
    CHECK_THROWS_AS(direct::extract_direct_batch(c, schema::food_product_descriptor(), g, opts), llm::UnknownModel);
}

TEST_CASE("a failed batch resumes from its checkpoint") {
    auto c = corpus::generate_shop(corpus::preset("alpha", 60, 3));
    oracle::OracleProvider oracle(c, {});
    testing::TempDir dir("direct-resume");
    direct::BatchOptions opts;
    opts.out_dir = dir.path();
    opts.threads = 1;
    const std::string broken = c.pages[40].page_id;

    {
        FailingFor flaky(oracle, broken);
        llm::CostLedger ledger;
        llm::Gateway g(flaky, llm::PriceTable::defaults(), ledger);
        auto out = direct::extract_direct_batch(c, schema::food_product_descriptor(), g, opts);
        CHECK(out.results.size() == 59);
        REQUIRE(out.failures.size() == 1);
        CHECK(out.failures.begin()->first == broken);
    }
    auto cp = json::parse(testing::read_file(dir / "checkpoint.json"));
    CHECK(cp["done"].size() == 59);

    llm::CostLedger ledger;
    llm::Gateway g(oracle, llm::PriceTable::defaults(), ledger);
    opts.threads = 4;
    auto out = direct::extract_direct_batch(c, schema::food_product_descriptor(), g, opts);
    CHECK(out.results.size() == 60);
    CHECK(out.resumed.size() == 59);
    CHECK(ledger.size() == 1);
    CHECK(out.failures.empty());
    for (std::size_t i = 0; i < 60; ++i) CHECK(out.results[i].product == c.truth[i].product);

    direct::BatchOptions other = opts;
    other.variant = html::Variant::Text;
    CHECK_THROWS_AS(direct::extract_direct_batch(c, schema::food_product_descriptor(), g, other),
                    PreconditionViolation);
}

TEST_CASE("an empty corpus gives an empty outcome") {
    corpus::Corpus c;
    c.shop_id = "none";
    oracle::OracleProvider p(c, {});
    llm::CostLedger ledger;
    llm::Gateway g(p, llm::PriceTable::defaults(), ledger);
    auto out = direct::extract_direct_batch(c, schema::food_product_descriptor(), g, {});
    CHECK(out.results.empty());
    CHECK(out.failures.empty());
    CHECK(ledger.size() == 0);
}
