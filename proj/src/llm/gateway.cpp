#include "shopx/llm/gateway.hpp"

#include "shopx/common/hash.hpp"
#include "shopx/html/compress.hpp"
#include "shopx/llm/prompts.hpp"
#include "shopx/schema/json_schema.hpp"

namespace shopx::llm {

using nlohmann::json;

std::string request_hash(const CompletionRequest& req) {
    json key = {{"model_id", req.model_id},
                {"system_prompt", req.system_prompt},
                {"user_prompt", req.user_prompt},
                {"schema", req.schema}};
    return sha256_hex(key.dump());
}

void require_valid_schema(const json& schema) {
    auto problems = schema::check_schema(schema);
    if (!problems.empty()) throw InvalidSchema("invalid response schema: " + describe(problems));
}

namespace {

std::vector<FieldError> check_response(const std::string& text, const json& schema) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) return {{"", "response is not valid JSON"}};
    return schema::validate_json(schema, doc);
}

} // namespace

StructuredResult Gateway::complete_structured(const CompletionRequest& req, Role role) {
    require_valid_schema(req.schema);
    prices_.rates(req.model_id);

    StructuredResult result;
    CompletionRequest attempt = req;
    for (int round = 0; round < 2; ++round) {
        CompletionResponse resp = provider_.complete(attempt);
        LedgerEntry e;
        e.exchange_ref = request_hash(attempt);
        e.model_id = attempt.model_id;
        e.role = role;
        e.prompt_template = attempt.prompt_template;
        e.page_id = attempt.page_id;
        if (resp.usage) {
            e.usage = *resp.usage;
        } else {
            e.usage.input_tokens = html::count_tokens(attempt.system_prompt) + html::count_tokens(attempt.user_prompt);
            e.usage.output_tokens = html::count_tokens(resp.json_text);
            e.usage_estimated = true;
        }
        e.cost = prices_.cost(e.usage, e.model_id);
        result.usage += e.usage;
        ++result.calls;
        ledger_.append(std::move(e));

        auto errors = check_response(resp.json_text, attempt.schema);
        if (errors.empty()) {
            result.json_text = std::move(resp.json_text);
            return result;
        }
        if (round == 1) throw SchemaViolation(std::move(errors));
        attempt.user_prompt = req.user_prompt + "\n\n" +
                              render(prompt_template("correction"), {{"errors", describe(errors)}});
        attempt.prompt_template = req.prompt_template + "+" + prompt_template("correction").tag();
    }
    throw SchemaViolation("", "unreachable");
}

} // namespace shopx::llm
