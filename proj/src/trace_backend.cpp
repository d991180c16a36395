#include "sentinel/trace_backend.hpp"

#include "sentinel/errors.hpp"

namespace sentinel {

namespace {

class TraceStream : public StepStream {
public:
    TraceStream(const GenerationTrace* trace, std::size_t max_tokens,
                std::shared_ptr<std::atomic<std::size_t>> served)
        : trace_(trace), max_tokens_(max_tokens), served_(std::move(served)) {}

    std::optional<TopKStep> next() override {
        if (pos_ >= trace_->steps.size() || pos_ >= max_tokens_) {
            return std::nullopt;
        }
        TopKStep step = to_topk_step(trace_->steps[pos_], pos_);
        ++pos_;
        served_->fetch_add(1, std::memory_order_relaxed);
        return step;
    }

private:
    const GenerationTrace* trace_;
    std::size_t max_tokens_;
    std::size_t pos_ = 0;
    std::shared_ptr<std::atomic<std::size_t>> served_;
};

}  // namespace

TraceBackend::TraceBackend(std::vector<GenerationTrace> traces)
    : traces_(std::move(traces)),
      served_(std::make_shared<std::atomic<std::size_t>>(0)) {
    index_.reserve(traces_.size());
    for (std::size_t i = 0; i < traces_.size(); ++i) {
        index_[traces_[i].prompt_hash] = i;
    }
}

TraceBackend TraceBackend::from_file(const std::filesystem::path& path) {
    return TraceBackend(read_trace_file(path));
}

const GenerationTrace* TraceBackend::find(const std::string& hash) const {
    auto it = index_.find(hash);
    return it == index_.end() ? nullptr : &traces_[it->second];
}

std::unique_ptr<StepStream> TraceBackend::open_stream(const GenerationRequest& req) {
    const std::string hash = prompt_hash(req.prompt);
    const GenerationTrace* trace = find(hash);
    if (trace == nullptr) {
        throw NoTraceForPromptError("no trace for prompt hash " + hash);
    }
    return std::make_unique<TraceStream>(trace, req.max_tokens, served_);
}

}  // namespace sentinel
