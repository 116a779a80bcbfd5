#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "shopx/llm/provider.hpp"

namespace shopx::llm {

/// One recorded exchange.
struct ChatExchange {
    std::string model_id;
    std::string system_prompt;
    std::string user_prompt;
    nlohmann::json schema;
    std::string response_text;
    Usage usage;
    std::string timestamp;
};

/// Session layout: one `<hash>.json` per distinct request holding the request
/// and every response seen for it, plus `index.json` listing calls in order.
class RecordingProvider : public Provider {
public:
    RecordingProvider(Provider& inner, std::filesystem::path dir);

    CompletionResponse complete(const CompletionRequest& req) override;
    std::string name() const override { return "record(" + inner_.name() + ")"; }

private:
    Provider& inner_;
    std::filesystem::path dir_;
    std::mutex mutex_;
    std::map<std::string, nlohmann::json> files_;
    nlohmann::json index_ = nlohmann::json::array();
};

/// Serves recorded responses by request hash. Repeated identical requests get
/// the recorded responses in order; the last one repeats once exhausted.
class ReplayProvider : public Provider {
public:
    /// Throws Error when the directory is missing or an indexed file is absent.
    explicit ReplayProvider(std::filesystem::path dir);

    CompletionResponse complete(const CompletionRequest& req) override;
    std::string name() const override { return "replay"; }

    std::size_t exchange_count() const noexcept { return call_count_; }
    /// Every recorded call in index order.
    std::vector<ChatExchange> exchanges() const;

private:
    std::filesystem::path dir_;
    std::mutex mutex_;
    std::map<std::string, nlohmann::json> files_;
    std::map<std::string, std::size_t> cursor_;
    nlohmann::json index_;
    std::size_t call_count_ = 0;
};

std::string utc_timestamp();

} // namespace shopx::llm
