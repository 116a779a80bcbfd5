#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "shopx/common/error.hpp"
#include "shopx/llm/pricing.hpp"

namespace shopx::llm {

struct CompletionRequest {
    std::string model_id;
    std::string system_prompt;
    std::string user_prompt;
    nlohmann::json schema; ///< response JSON Schema
    std::string schema_name = "response";

    // Bookkeeping only; not sent and not part of the content hash.
    std::string prompt_template;
    std::string page_id;
};

struct CompletionResponse {
    std::string json_text;
    std::optional<Usage> usage; ///< empty when the provider does not report usage
};

/// SHA-256 over (model_id, system_prompt, user_prompt, schema).
std::string request_hash(const CompletionRequest& req);

class TransportError : public Error {
public:
    using Error::Error;
};

class ProviderRefusal : public Error {
public:
    using Error::Error;
};

class ReplayMiss : public Error {
public:
    using Error::Error;
};

class InvalidSchema : public PreconditionViolation {
public:
    using PreconditionViolation::PreconditionViolation;
};

/// A chat-completion backend. Implementations must be safe to call from
/// several threads at once.
class Provider {
public:
    virtual ~Provider() = default;
    virtual CompletionResponse complete(const CompletionRequest& req) = 0;
    virtual std::string name() const = 0;
};

/// Throws InvalidSchema when `schema` is not a usable JSON Schema.
void require_valid_schema(const nlohmann::json& schema);

} // namespace shopx::llm
