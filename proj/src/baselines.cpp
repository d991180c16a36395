#include "sentinel/baselines.hpp"

#include <cmath>
#include <string>

#include "sentinel/errors.hpp"

namespace sentinel {

void ConfGuardConfig::validate() const {
    if (!(p_threshold > 0.0) || !(p_threshold < 1.0)) {
        throw DomainError("p_threshold must lie in (0,1)");
    }
    if (window_l < 1) {
        throw DomainError("window_l must be >= 1");
    }
}

ConfGuardMonitor::ConfGuardMonitor(ConfGuardConfig cfg) : cfg_(cfg) {
    cfg_.validate();
}

void ConfGuardMonitor::reset() {
    consec_ = 0;
    have_last_step_ = false;
    last_step_ = 0;
    halted_step_.reset();
}

StepDecision ConfGuardMonitor::observe(const TopKStep& step) {
    if (halted_step_.has_value()) {
        return StepDecision::Halt;
    }
    if (have_last_step_ && step.step_index <= last_step_) {
        throw OutOfOrderError("step_index " + std::to_string(step.step_index) +
                              " not after " + std::to_string(last_step_));
    }
    have_last_step_ = true;
    last_step_ = step.step_index;

    if (step.topk.empty()) {
        throw DomainError("step carries no probabilities");
    }
    // Raw generation confidence, before any top-k renormalization.
    const double top1 = step.topk.front().prob;
    if (top1 >= cfg_.p_threshold) {
        ++consec_;
    } else {
        consec_ = 0;
    }
    if (consec_ >= cfg_.window_l) {
        halted_step_ = step.step_index;
        return StepDecision::Halt;
    }
    return StepDecision::Continue;
}

}  // namespace sentinel
