#include <atomic>
#include <chrono>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "doctest.h"
#include "test_support.hpp"
#include "shopx/llm/gateway.hpp"
#include "shopx/llm/live.hpp"
#include "shopx/llm/prompts.hpp"
#include "shopx/llm/session.hpp"
#include "shopx/schema/descriptor.hpp"

using namespace shopx;
using namespace shopx::llm;
using nlohmann::json;

namespace {

// Answers from a script, one entry per call; the last entry repeats.
class ScriptedProvider : public Provider {
public:
    explicit ScriptedProvider(std::vector<std::string> replies, std::optional<Usage> usage = Usage{100, 20, 10})
        : replies_(std::move(replies)), usage_(usage) {}

    CompletionResponse complete(const CompletionRequest& req) override {
        seen.push_back(req);
        std::string text = replies_[std::min(seen.size() - 1, replies_.size() - 1)];
        return {text, usage_};
    }
    std::string name() const override { return "scripted"; }

    std::vector<CompletionRequest> seen;

private:
    std::vector<std::string> replies_;
    std::optional<Usage> usage_;
};

CompletionRequest product_request(const std::string& user = "Task: direct_extraction\n=== PAGE ===\nx\n=== END PAGE ===") {
    CompletionRequest r;
    r.model_id = "o3-mini";
    r.system_prompt = "extract";
    r.user_prompt = user;
    r.schema = schema::to_json_schema_document(schema::food_product_descriptor());
    r.prompt_template = "test@1";
    return r;
}

// Exact cost in pico-USD with 128-bit intermediates, from USD-per-1M rates
// given in hundredths of a dollar.
std::int64_t exact_cost(const Usage& u, std::int64_t in_cents, std::int64_t cached_cents, std::int64_t out_cents) {
    __int128 total = static_cast<__int128>(u.input_tokens - u.cached_input_tokens) * in_cents +
                     static_cast<__int128>(u.cached_input_tokens) * cached_cents +
                     static_cast<__int128>(u.output_tokens) * out_cents;
    // cents per 1M tokens -> pico-USD per token is cents * 1e10 / 1e6 = cents * 1e4.
    return static_cast<std::int64_t>(total * 10000);
}

} // namespace

TEST_CASE("table prices") {
    PriceTable t = PriceTable::defaults();
    CHECK(t.cost({1'000'000, 0, 0}, "o3-mini").usd() == "1.10");
    CHECK(t.cost({1'000'000, 1'000'000, 0}, "gpt-4o").usd() == "1.25");
    CHECK(t.cost({0, 0, 0}, "o3-mini").usd() == "0.00");
    CHECK(t.cost({0, 0, 1'000'000}, "o3-mini") == Money::from_usd_string("4.40"));
    CHECK(t.cost({0, 0, 1'000'000}, "gpt-4o") == Money::from_usd_string("10"));
    CHECK(t.cost({1'000'000, 1'000'000, 0}, "o3-mini") == Money::from_usd_string("0.55"));
    CHECK(t.cost({1'000'000, 0, 0}, "gpt-4o") == Money::from_usd_string("2.50"));
    CHECK_THROWS_AS(t.cost({1, 0, 0}, "gpt-5"), UnknownModel);
    CHECK_THROWS_AS(t.cost({1, 2, 0}, "o3-mini"), PreconditionViolation);
    CHECK(Money{44}.usd() == "0.000000000044");
}

TEST_CASE("price table loads from JSON") {
    auto t = PriceTable::from_json(json::parse(R"({"m":{"input":"0.15","cached_input":0.075,"output":"0.60"}})"));
    CHECK(t.cost({2'000'000, 1'000'000, 1'000'000}, "m").usd() == "0.825");
    CHECK_THROWS(PriceTable::from_json(json::parse(R"({"m":{"input":"-1","cached_input":"0","output":"0"}})")));
    CHECK_THROWS(PriceTable::from_json(json::parse(R"({"m":{"input":"1"}})")));
    CHECK_THROWS(PriceTable::from_json(json::parse(R"({"m":{"input":"0.0000001","cached_input":"0","output":"0"}})")));
}

TEST_CASE("ledger total equals the entry sum exactly") {
    PriceTable t = PriceTable::defaults();
    CostLedger ledger;
    std::mt19937_64 rng(5);
    std::int64_t expected = 0;
    for (int i = 0; i < 5000; ++i) {
        Usage u;
        u.input_tokens = static_cast<std::int64_t>(rng() % 200'000);
        u.cached_input_tokens = static_cast<std::int64_t>(rng() % (u.input_tokens + 1));
        u.output_tokens = static_cast<std::int64_t>(rng() % 50'000);
        bool mini = rng() % 2 == 0;
        LedgerEntry e;
        e.model_id = mini ? "o3-mini" : "gpt-4o";
        e.role = mini ? Role::Direct : Role::DecisionGen;
        e.usage = u;
        e.cost = t.cost(u, e.model_id);
        std::int64_t want = mini ? exact_cost(u, 110, 55, 440) : exact_cost(u, 250, 125, 1000);
        REQUIRE(e.cost.pico_usd == want);
        expected += want;
        ledger.append(e);
    }
    CHECK(ledger.total().pico_usd == expected);
    CostLedger back = CostLedger::from_json(json::parse(ledger.to_json().dump()));
    CHECK(back.entries() == ledger.entries());
    CHECK(back.total() == ledger.total());

    json tampered = ledger.to_json();
    tampered["total_pico_usd"] = expected + 1;
    CHECK_THROWS_AS(CostLedger::from_json(tampered), SchemaViolation);
}

TEST_CASE("ledger appends from many threads") {
    CostLedger ledger;
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 500; ++i) ledger.append({"h", "o3-mini", Role::Refine, "", "", {1, 0, 1}, false, Money{3}});
        });
    }
    for (auto& th : threads) th.join();
    CHECK(ledger.size() == 4000);
    CHECK(ledger.total().pico_usd == 12000);
    CHECK(ledger.count(Role::Refine) == 4000);
}

TEST_CASE("prompt templates") {
    for (const PromptTemplate* t : all_prompt_templates()) {
        CHECK(t->version >= 1);
        CHECK(t->hash.size() == 16);
    }
    const auto& direct = prompt_template("direct_user");
    std::string text = render(direct, {{"variant", "TEXT"}, {"page", "Zutaten: Zucker"}});
    CHECK(prompt_header(text, "Task") == "direct_extraction");
    CHECK(prompt_header(text, "Format") == "TEXT");
    CHECK(prompt_section(text, "PAGE") == "Zutaten: Zucker");
    CHECK_FALSE(prompt_section(text, "REFERENCE").has_value());
    CHECK_THROWS_AS(render(direct, {{"variant", "TEXT"}}), Error);
    CHECK_THROWS_AS(prompt_template("nope"), Error);
    CHECK(direct.tag().starts_with("direct_user@1#"));
}

TEST_CASE("gateway validates, retries once and records every call") {
    const std::string good = R"({"fat":{"value":3.5,"unit_code":"GRM"}})";
    const std::string bad = R"({"fat":{"value":"lots"}})";
    PriceTable prices = PriceTable::defaults();

    SUBCASE("valid on first call") {
        ScriptedProvider p({good});
        CostLedger ledger;
        Gateway gw(p, prices, ledger);
        auto r = gw.complete_structured(product_request(), Role::Direct);
        CHECK(r.json_text == good);
        CHECK(r.calls == 1);
        REQUIRE(ledger.size() == 1);
        CHECK(ledger.entries()[0].role == Role::Direct);
        CHECK(ledger.entries()[0].cost == prices.cost({100, 20, 10}, "o3-mini"));
    }
    SUBCASE("corrective retry") {
        ScriptedProvider p({bad, good});
        CostLedger ledger;
        Gateway gw(p, prices, ledger);
        auto r = gw.complete_structured(product_request(), Role::Reference);
        CHECK(r.json_text == good);
        CHECK(r.calls == 2);
        CHECK(ledger.size() == 2);
        REQUIRE(p.seen.size() == 2);
        CHECK(p.seen[1].user_prompt.find("does not conform") != std::string::npos);
        CHECK(p.seen[1].user_prompt.find("fat.value") != std::string::npos);
    }
    SUBCASE("second violation raises") {
        ScriptedProvider p({bad, "not json"});
        CostLedger ledger;
        Gateway gw(p, prices, ledger);
        CHECK_THROWS_AS(gw.complete_structured(product_request(), Role::Direct), SchemaViolation);
        CHECK(ledger.size() == 2);
    }
    SUBCASE("malformed schema is rejected before any call") {
        ScriptedProvider p({good});
        CostLedger ledger;
        Gateway gw(p, prices, ledger);
        auto req = product_request();
        req.schema = json::parse(R"({"type":"objekt"})");
        CHECK_THROWS_AS(gw.complete_structured(req, Role::Direct), InvalidSchema);
        CHECK(p.seen.empty());
        req = product_request();
        req.model_id = "unknown-model";
        CHECK_THROWS_AS(gw.complete_structured(req, Role::Direct), UnknownModel);
        CHECK(p.seen.empty());
    }
    SUBCASE("usage is estimated when the provider omits it") {
        ScriptedProvider p({good}, std::nullopt);
        CostLedger ledger;
        Gateway gw(p, prices, ledger);
        gw.complete_structured(product_request(), Role::Direct);
        auto e = ledger.entries().at(0);
        CHECK(e.usage_estimated);
        CHECK(e.usage.output_tokens == static_cast<std::int64_t>((good.size() + 3) / 4));
        CHECK(e.usage.input_tokens > 0);
    }
}

TEST_CASE("record then replay") {
    shopx::testing::TempDir dir("session");
    std::vector<std::string> replies;
    for (int i = 0; i < 6; ++i) replies.push_back(R"({"salt":{"value":)" + std::to_string(i) + R"(,"unit_code":"GRM"}})");

    std::vector<std::string> recorded;
    {
        ScriptedProvider inner(replies);
        RecordingProvider rec(inner, dir.path());
        for (int i = 0; i < 6; ++i) {
            // The last two requests are identical; replay must serve both answers in order.
            std::string user = "page " + std::to_string(std::min(i, 4));
            recorded.push_back(rec.complete(product_request(user)).json_text);
        }
    }
    CHECK(std::filesystem::exists(dir / "index.json"));

    auto replay_ledger = [&] {
        ReplayProvider replay(dir.path());
        CostLedger ledger;
        Gateway gw(replay, PriceTable::defaults(), ledger);
        for (int i = 0; i < 6; ++i) {
            auto r = gw.complete_structured(product_request("page " + std::to_string(std::min(i, 4))), Role::Direct);
            CHECK(r.json_text == recorded[static_cast<std::size_t>(i)]);
        }
        CHECK(replay.exchange_count() == 6);
        CHECK(replay.exchanges().size() == 6);
        CHECK_THROWS_AS(replay.complete(product_request("page 99")), ReplayMiss);
        return ledger;
    };
    CostLedger a = replay_ledger();
    CostLedger b = replay_ledger();
    CHECK(a.size() == 6);
    CHECK(a.to_json().dump() == b.to_json().dump());

    std::filesystem::remove(dir / (request_hash(product_request("page 0")) + ".json"));
    CHECK_THROWS_AS(ReplayProvider(dir.path()), Error);
    CHECK_THROWS_AS(ReplayProvider(dir / "missing"), Error);
}

TEST_CASE("live provider against a local server") {
    httplib::Server server;
    std::atomic<int> hits{0};
    std::atomic<int> failures_left{0};
    std::atomic<int> active{0};
    std::atomic<int> peak{0};
    std::string mode = "ok";
    json last_body;
    std::mutex body_mutex;

    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        int now = ++active;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {
        }
        {
            std::lock_guard lock(body_mutex);
            last_body = json::parse(req.body);
        }
        if (mode == "slow") std::this_thread::sleep_for(std::chrono::milliseconds(40));
        --active;
        if (failures_left > 0) {
            --failures_left;
            res.status = 503;
            return;
        }
        if (mode == "bad_request") {
            res.status = 400;
            return;
        }
        json msg = {{"role", "assistant"}, {"content", R"({"protein":{"value":6.3,"unit_code":"GRM"}})"}};
        if (mode == "refuse") msg = {{"role", "assistant"}, {"content", nullptr}, {"refusal", "cannot help"}};
        json reply = {{"choices", json::array({{{"message", msg}}})},
                      {"usage", {{"prompt_tokens", 120}, {"completion_tokens", 9}, {"prompt_tokens_details", {{"cached_tokens", 100}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    LiveConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.api_key = "k";
    cfg.initial_backoff = std::chrono::milliseconds(1);
    LiveProvider live(cfg);

    SUBCASE("round trip and usage") {
        auto r = live.complete(product_request());
        CHECK(r.json_text == R"({"protein":{"value":6.3,"unit_code":"GRM"}})");
        REQUIRE(r.usage.has_value());
        CHECK(*r.usage == Usage{120, 100, 9});
        std::lock_guard lock(body_mutex);
        CHECK(last_body["model"] == "o3-mini");
        CHECK(last_body["response_format"]["type"] == "json_schema");
        CHECK(last_body["response_format"]["json_schema"]["schema"] == product_request().schema);
        CHECK(last_body["messages"].size() == 2);
    }
    SUBCASE("transient failures are retried") {
        failures_left = 2;
        CHECK_NOTHROW(live.complete(product_request()));
        CHECK(hits == 3);
        failures_left = 4;
        CHECK_THROWS_AS(live.complete(product_request()), TransportError);
        CHECK(hits == 3 + 4);
    }
    SUBCASE("client errors are not retried") {
        mode = "bad_request";
        CHECK_THROWS_AS(live.complete(product_request()), TransportError);
        CHECK(hits == 1);
    }
    SUBCASE("refusals surface as ProviderRefusal") {
        mode = "refuse";
        CHECK_THROWS_AS(live.complete(product_request()), ProviderRefusal);
    }
    SUBCASE("malformed schema never reaches the network") {
        auto req = product_request();
        req.schema = json::parse(R"({"properties":{"a":{"$ref":"#/$defs/none"}}})");
        CHECK_THROWS_AS(live.complete(req), InvalidSchema);
        CHECK(hits == 0);
    }
    SUBCASE("in-flight requests are capped") {
        mode = "slow";
        std::vector<std::thread> callers;
        for (int i = 0; i < 12; ++i) callers.emplace_back([&] { live.complete(product_request()); });
        for (auto& c : callers) c.join();
        CHECK(hits == 12);
        CHECK(live.peak_in_flight() <= 4);
        CHECK(peak <= 4);
    }

    server.stop();
    th.join();
}

TEST_CASE("connection failures exhaust retries") {
    LiveConfig cfg;
    cfg.base_url = "http://127.0.0.1:1";
    cfg.initial_backoff = std::chrono::milliseconds(1);
    cfg.timeout = std::chrono::seconds(2);
    LiveProvider live(cfg);
    CHECK_THROWS_AS(live.complete(product_request()), TransportError);
    CHECK_THROWS_AS(LiveProvider(LiveConfig{}), PreconditionViolation);
}
