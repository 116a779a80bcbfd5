#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "shopx/llm/live.hpp"

#include <cstdlib>
#include <thread>

namespace shopx::llm {

using nlohmann::json;

LiveConfig LiveConfig::from_env() {
    LiveConfig c;
    if (const char* v = std::getenv("SHOPX_LLM_BASE_URL")) c.base_url = v;
    if (const char* v = std::getenv("SHOPX_LLM_API_KEY")) c.api_key = v;
    if (const char* v = std::getenv("SHOPX_LLM_MAX_IN_FLIGHT")) c.max_in_flight = std::max(1, std::atoi(v));
    return c;
}

LiveProvider::LiveProvider(LiveConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw PreconditionViolation("live provider needs a base URL (SHOPX_LLM_BASE_URL)");
    if (config_.max_in_flight < 1) throw PreconditionViolation("max_in_flight must be at least 1");
    auto scheme = config_.base_url.find("://");
    if (scheme == std::string::npos) throw PreconditionViolation("base URL needs a scheme: " + config_.base_url);
    auto slash = config_.base_url.find('/', scheme + 3);
    origin_ = config_.base_url.substr(0, slash);
    std::string prefix = slash == std::string::npos ? "" : config_.base_url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    path_ = prefix + config_.path;
}

int LiveProvider::peak_in_flight() const {
    std::lock_guard lock(mutex_);
    return peak_;
}

CompletionResponse LiveProvider::send_once(const std::string& body, bool& transient) {
    transient = false;
    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
        transient = true;
        throw TransportError("request to " + origin_ + path_ + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        transient = res->status == 408 || res->status == 409 || res->status == 429 || res->status >= 500;
        throw TransportError("HTTP " + std::to_string(res->status) + " from " + origin_ + path_);
    }
    json doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
        throw TransportError("malformed completion response");
    }
    const json& message = doc["choices"][0].value("message", json::object());
    if (message.contains("refusal") && message["refusal"].is_string()) {
        throw ProviderRefusal(message["refusal"].get<std::string>());
    }
    if (!message.contains("content") || !message["content"].is_string()) {
        throw TransportError("completion response has no message content");
    }
    CompletionResponse out;
    out.json_text = message["content"].get<std::string>();
    if (doc.contains("usage") && doc["usage"].is_object()) {
        const json& u = doc["usage"];
        Usage usage;
        usage.input_tokens = u.value("prompt_tokens", std::int64_t{0});
        usage.output_tokens = u.value("completion_tokens", std::int64_t{0});
        if (u.contains("prompt_tokens_details") && u["prompt_tokens_details"].is_object()) {
            usage.cached_input_tokens = u["prompt_tokens_details"].value("cached_tokens", std::int64_t{0});
        }
        usage.cached_input_tokens = std::min(usage.cached_input_tokens, usage.input_tokens);
        out.usage = usage;
    }
    return out;
}

CompletionResponse LiveProvider::complete(const CompletionRequest& req) {
    require_valid_schema(req.schema);
    json body = {{"model", req.model_id},
                 {"messages",
                  json::array({{{"role", "system"}, {"content", req.system_prompt}},
                               {{"role", "user"}, {"content", req.user_prompt}}})},
                 {"response_format",
                  {{"type", "json_schema"},
                   {"json_schema", {{"name", req.schema_name}, {"schema", req.schema}, {"strict", false}}}}}};
    const std::string payload = body.dump();

    {
        std::unique_lock lock(mutex_);
        slot_free_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
        ++in_flight_;
        peak_ = std::max(peak_, in_flight_);
    }
    struct Release {
        LiveProvider* self;
        ~Release() {
            {
                std::lock_guard lock(self->mutex_);
                --self->in_flight_;
            }
            self->slot_free_.notify_one();
        }
    } release{this};

    auto delay = config_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        bool transient = false;
        try {
            return send_once(payload, transient);
        } catch (const TransportError&) {
            if (!transient || attempt >= config_.max_retries) throw;
        }
        std::this_thread::sleep_for(delay);
        delay *= 2;
    }
}

} // namespace shopx::llm
