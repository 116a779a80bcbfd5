#include "doctest.h"
#include "shopx/corpus/corpus.hpp"
#include "shopx/direct/direct.hpp"
#include "shopx/dsl/interpreter.hpp"
#include "shopx/llm/prompts.hpp"
#include "shopx/oracle/oracle.hpp"
#include "shopx/schema/json_schema.hpp"

using namespace shopx;
using nlohmann::json;

namespace {

llm::CompletionRequest rules_request(const std::string& task_prompt) {
    llm::CompletionRequest req;
    req.model_id = "o3-mini";
    req.system_prompt = "sys";
    req.user_prompt = task_prompt;
    req.schema = dsl::extraction_response_schema();
    return req;
}

std::string generation_prompt(const html::CompressedDocument& page, const schema::FoodProduct& ref) {
    return llm::render(llm::prompt_template("function_user"),
                       {{"candidate", "1"}, {"reference", schema::serialize_product(ref)}, {"page", page.content}});
}

std::vector<dsl::FieldRule> rules_of(const std::string& answer) {
    auto parsed = dsl::parse_rules(json::parse(answer));
    REQUIRE(parsed.ok());
    return *parsed.program;
}

int differing(const std::vector<dsl::FieldRule>& rules, const dsl::ExtractionProgram& truth) {
    int n = 0;
    for (const auto& want : truth.rules) {
        auto it = std::find(rules.begin(), rules.end(), want);
        n += it == rules.end();
    }
    return n + static_cast<int>(rules.size() > truth.rules.size() ? rules.size() - truth.rules.size() : 0);
}

} // namespace

TEST_CASE("direct answers equal the ground truth and conform to the schema") {
    auto c = corpus::generate_shop(corpus::preset("gamma", 30, 3));
    oracle::OracleProvider p(c, {});
    for (std::size_t i = 0; i < c.pages.size(); ++i) {
        auto doc = html::compress_html(c.pages[i]);
        for (auto d : {doc, html::extract_text(doc)}) {
            auto req = direct::direct_request(d, schema::food_product_descriptor(), "o3-mini");
            auto resp = p.complete(req);
            CHECK(schema::validate_json(req.schema, json::parse(resp.json_text)).empty());
            CHECK(schema::parse_product_or_throw(resp.json_text) == c.truth[i].product);
            REQUIRE(resp.usage);
            CHECK(resp.usage->output_tokens == html::count_tokens(resp.json_text));
        }
    }
}

TEST_CASE("an unknown page gets an empty object and unknown tasks are refused") {
    auto c = corpus::generate_shop(corpus::preset("alpha", 5, 1));
    oracle::OracleProvider p(c, {});
    html::CompressedDocument doc{"x", html::Variant::Text, "nothing here", 3};
    CHECK(p.complete(direct::direct_request(doc, schema::food_product_descriptor(), "o3-mini")).json_text == "{}");
    CHECK_THROWS_AS(p.complete(rules_request("Task: poetry\n")), llm::ProviderRefusal);
}

TEST_CASE("generation injects the configured number of broken rules and refinement repairs one per call") {
    auto c = corpus::generate_shop(corpus::preset("beta", 40, 5));
    std::size_t i = 0;
    while (!corpus::is_positive(c.truth[i])) ++i;
    auto page = html::compress_html(c.pages[i]);
    const auto& ref = c.truth[i].product;
    auto truth = corpus::true_program_for(c.truth[i].template_id);

    oracle::OracleConfig cfg;
    cfg.imperfections = 2;
    oracle::OracleProvider p(c, cfg);
    auto rules = rules_of(p.complete(rules_request(generation_prompt(page, ref))).json_text);
    CHECK(differing(rules, truth) == 2);

    for (int step = 1; step <= 2; ++step) {
        std::string prompt = llm::render(llm::prompt_template("refine_user"),
                                         {{"candidate", "1"},
                                          {"refinement", std::to_string(step)},
                                          {"program", json{{"rules", dsl::rules_to_json(rules)}}.dump()},
                                          {"feedback", "x"},
                                          {"reference", schema::serialize_product(ref)},
                                          {"page", page.content}});
        rules = rules_of(p.complete(rules_request(prompt)).json_text);
        CHECK(differing(rules, truth) == 2 - step);
    }
    dsl::ExtractionProgram prog = truth;
    prog.rules = rules;
    CHECK(dsl::run_extraction(prog, page).product == ref);
}

TEST_CASE("unreparable templates stay broken") {
    auto c = corpus::generate_shop(corpus::preset("alpha", 20, 2));
    std::size_t i = 0;
    while (!corpus::is_positive(c.truth[i])) ++i;
    auto page = html::compress_html(c.pages[i]);
    oracle::OracleConfig cfg;
    cfg.imperfections = 0;
    cfg.unreparable_templates = {"alpha-main"};
    oracle::OracleProvider p(c, cfg);
    auto truth = corpus::true_program_for("alpha-main");
    auto rules = rules_of(p.complete(rules_request(generation_prompt(page, c.truth[i].product))).json_text);
    CHECK(differing(rules, truth) >= 1);
    std::string prompt = llm::render(llm::prompt_template("refine_user"),
                                     {{"candidate", "1"},
                                      {"refinement", "1"},
                                      {"program", json{{"rules", dsl::rules_to_json(rules)}}.dump()},
                                      {"feedback", "x"},
                                      {"reference", schema::serialize_product(c.truth[i].product)},
                                      {"page", page.content}});
    CHECK(rules_of(p.complete(rules_request(prompt)).json_text) == rules);
}

TEST_CASE("answers depend only on seed and request content") {
    auto c = corpus::generate_shop(corpus::preset("alpha", 20, 2));
    oracle::OracleConfig cfg;
    cfg.max_random_imperfections = 3;
    cfg.seed = 11;
    oracle::OracleProvider a(c, cfg), b(c, cfg);
    auto page = html::compress_html(c.pages[3]);
    auto req = rules_request(generation_prompt(page, c.truth[3].product));
    a.complete(direct::direct_request(page, schema::food_product_descriptor(), "o3-mini"));
    CHECK(a.complete(req).json_text == b.complete(req).json_text);
}

TEST_CASE("oracle config round trip and range checks") {
    oracle::OracleConfig cfg;
    cfg.decision_noise = 0.25;
    cfg.unreparable_templates = {"t1"};
    cfg.seed = 9;
    auto back = oracle::OracleConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
    CHECK_THROWS_AS(oracle::OracleConfig::from_json(json{{"decision_noise", 2.0}}), PreconditionViolation);
    CHECK_THROWS_AS(oracle::OracleConfig::from_json(json{{"seed", "x"}}), SchemaViolation);
}
