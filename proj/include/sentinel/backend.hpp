#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "sentinel/entropy.hpp"
#include "sentinel/prompt.hpp"

namespace sentinel {

struct GenerationRequest {
    PromptBundle prompt;
    int topk = 20;
    std::size_t max_tokens = 4096;
    std::string session_id;
};

/// Pull-based step sequence. next() yields steps in order with step_index
/// contiguous from 0; nullopt signals exhaustion (after the EOS step or the
/// request's max_tokens). Dropping the stream at any point abandons it
/// without protocol violation. Single consumer per stream.
class StepStream {
public:
    virtual ~StepStream() = default;
    virtual std::optional<TopKStep> next() = 0;
};

/// Source of token-probability streams. Implementations are shareable
/// across concurrent sessions.
class GenerationBackend {
public:
    virtual ~GenerationBackend() = default;
    virtual std::unique_ptr<StepStream> open_stream(const GenerationRequest& req) = 0;
};

}  // namespace sentinel
