#pragma once

#include <memory>
#include <string>

#include "sentinel/backend.hpp"

namespace sentinel {

/// Connection settings for a chat-completions-compatible endpoint that
/// streams per-token top-k log-probabilities.
struct ApiConfig {
    std::string base_url;  // e.g. "http://127.0.0.1:8080/v1"
    std::string api_key;
    std::string model;
    int connect_timeout_s = 10;
    int read_timeout_s = 300;

    /// Reads SENTINEL_API_BASE, SENTINEL_API_KEY, SENTINEL_MODEL.
    static ApiConfig from_env();
};

/// Live backend speaking the chat-completions wire protocol with
/// stream=true, logprobs=true and top_logprobs=k. Log-probabilities are
/// exponentiated exactly once; when the endpoint supplies fewer than k
/// alternatives the step proceeds with the provided k'. Abandoning the
/// stream cancels the underlying transfer, so an early halt consumes no
/// further tokens.
class ApiBackend : public GenerationBackend {
public:
    explicit ApiBackend(ApiConfig cfg);
    ~ApiBackend() override;

    /// Throws ConnectError when the endpoint is unreachable or rejects the
    /// request; stream consumption may later throw ProtocolError (malformed
    /// payload) or TopKUnavailableError (no alternatives supplied).
    std::unique_ptr<StepStream> open_stream(const GenerationRequest& req) override;

private:
    ApiConfig cfg_;
};

}  // namespace sentinel
