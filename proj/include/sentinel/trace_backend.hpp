#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentinel/backend.hpp"
#include "sentinel/trace.hpp"

namespace sentinel {

/// Deterministic replay backend over a set of recorded traces. A request
/// is answered by the trace whose key equals the content hash of the
/// request's prompt; unmatched prompts raise NoTraceForPromptError.
///
/// Streams borrow the backend's trace storage: the backend must outlive
/// every stream it opened. Concurrent streams are fine; each stream is
/// single-consumer.
class TraceBackend : public GenerationBackend {
public:
    explicit TraceBackend(std::vector<GenerationTrace> traces);

    static TraceBackend from_file(const std::filesystem::path& path);

    std::unique_ptr<StepStream> open_stream(const GenerationRequest& req) override;

    /// Lookup by prompt hash; nullptr when absent.
    const GenerationTrace* find(const std::string& hash) const;

    const std::vector<GenerationTrace>& traces() const { return traces_; }

    /// Total steps handed out across all streams (abandoned ones included).
    std::size_t steps_served() const { return served_->load(); }

private:
    std::vector<GenerationTrace> traces_;
    std::unordered_map<std::string, std::size_t> index_;
    std::shared_ptr<std::atomic<std::size_t>> served_;
};

}  // namespace sentinel
