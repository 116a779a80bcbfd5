#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>

#include "shopx/llm/provider.hpp"

namespace shopx::llm {

struct LiveConfig {
    std::string base_url; ///< e.g. "https://api.openai.com"; path prefixes are kept
    std::string api_key;
    std::string path = "/v1/chat/completions";
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::seconds timeout{120};
    int max_in_flight = 4;

    /// SHOPX_LLM_BASE_URL, SHOPX_LLM_API_KEY, SHOPX_LLM_MAX_IN_FLIGHT.
    static LiveConfig from_env();
};

/// OpenAI-compatible chat-completions client using json_schema response
/// formatting. Transient failures (connection errors, 408, 409, 429, 5xx) are
/// retried with exponential backoff; at most max_in_flight requests run at once.
class LiveProvider : public Provider {
public:
    explicit LiveProvider(LiveConfig config);

    CompletionResponse complete(const CompletionRequest& req) override;
    std::string name() const override { return "live"; }

    int peak_in_flight() const;

private:
    CompletionResponse send_once(const std::string& body, bool& transient);

    LiveConfig config_;
    std::string origin_;
    std::string path_;
    mutable std::mutex mutex_;
    std::condition_variable slot_free_;
    int in_flight_ = 0;
    int peak_ = 0;
};

} // namespace shopx::llm
