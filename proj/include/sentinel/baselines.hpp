#pragma once

#include <cstddef>
#include <optional>

#include "sentinel/entropy.hpp"
#include "sentinel/monitor.hpp"

namespace sentinel {

/// Confidence-threshold baseline: halts once the raw top-1 probability has
/// stayed at or above p_threshold for window_l consecutive steps.
struct ConfGuardConfig {
    double p_threshold = 0.99;  // P
    std::size_t window_l = 10;  // L

    void validate() const;
};

class ConfGuardMonitor {
public:
    explicit ConfGuardMonitor(ConfGuardConfig cfg);

    /// Feed the next step. The top-1 probability is read raw from the
    /// step, before any renormalization. Steps must arrive with strictly
    /// increasing step_index. Once halted, stays halted.
    StepDecision observe(const TopKStep& step);

    bool halted() const { return halted_step_.has_value(); }
    std::optional<std::size_t> halted_step() const { return halted_step_; }
    void reset();

private:
    ConfGuardConfig cfg_;
    std::size_t consec_ = 0;
    bool have_last_step_ = false;
    std::size_t last_step_ = 0;
    std::optional<std::size_t> halted_step_;
};

}  // namespace sentinel
