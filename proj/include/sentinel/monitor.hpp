#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sentinel/entropy.hpp"

namespace sentinel {

/// Streaming monitor parameters. Defaults follow the reference
/// configuration: window of 5, 6 consecutive satisfying steps, entropy
/// ceiling 1e-2 nats.
struct MonitorConfig {
    std::size_t window_h = 5;        // H: sliding window length
    std::size_t consec_c = 6;        // C: consecutive satisfying steps to flag
    double gamma = 1e-2;             // entropy ceiling, nats
    double stability_epsilon = 0.0;  // additive slack on the trend interval

    /// Throws DomainError when a field is out of range.
    void validate() const;
};

/// Mean and population standard deviation (divisor H) of the window.
struct WindowStats {
    double mean = 0.0;
    double std_dev = 0.0;
    bool filled = false;
};

enum class LullKind { Sustained, Completed };

/// A flagged entropy lull. `run_length` is the number of consecutive
/// satisfying steps at the moment of flagging (== consec_c for Sustained,
/// in [1, consec_c) for Completed).
struct LullEvent {
    LullKind kind = LullKind::Sustained;
    std::size_t flagged_step = 0;
    double window_mean = 0.0;
    std::size_t run_length = 0;
};

enum class StepDecision { Continue, Halt };

/// Per-step monitor output. Stats and condition flags are exposed for the
/// CSV dump path; they are meaningful only once the window has filled.
struct Observation {
    StepDecision decision = StepDecision::Continue;
    std::optional<LullEvent> event;
    WindowStats stats;
    bool low_magnitude = false;
    bool stable_trend = false;
};

/// Window mean must not exceed the entropy ceiling (non-strict).
/// Throws WindowNotFilledError when stats.filled is false.
bool check_low_magnitude(const WindowStats& stats, const MonitorConfig& cfg);

/// Current window mean must lie within one standard deviation of the
/// previous step's window mean, widened by eps on both sides (non-strict,
/// so a perfectly constant stream satisfies it with eps = 0).
/// Throws WindowNotFilledError when prev.filled is false.
bool check_stable_trend(double curr_mean, const WindowStats& prev, double eps);

/// Streaming lull detector. One instance per generation stream; not safe
/// for concurrent observe() calls on the same instance.
///
/// No condition is evaluated before the window holds H samples. At the
/// first evaluable step there is no preceding window, so the trend
/// condition is vacuously true and only the magnitude condition gates the
/// counter. The counter resets to zero on any step where either condition
/// fails. Flagging freezes the state: further observe() calls throw.
class LullMonitor {
public:
    explicit LullMonitor(MonitorConfig cfg);

    /// Feed the next entropy sample. Samples must arrive with strictly
    /// increasing step_index (OutOfOrderError otherwise); calling after a
    /// flag throws StateFrozenError.
    Observation observe(const EntropySample& sample);

    /// Restore the freshly-constructed state.
    void reset();

    bool flagged() const { return event_.has_value(); }
    const std::optional<LullEvent>& event() const { return event_; }
    std::size_t samples_seen() const { return count_; }
    const MonitorConfig& config() const { return cfg_; }

private:
    WindowStats window_stats() const;

    MonitorConfig cfg_;
    std::vector<double> ring_;
    std::size_t count_ = 0;
    bool have_last_step_ = false;
    std::size_t last_step_ = 0;
    std::optional<WindowStats> prev_stats_;
    std::size_t consec_ = 0;
    std::optional<LullEvent> event_;
};

/// Whole-sequence reference scan: returns the event a streaming monitor
/// would emit on the same samples, or nullopt. Implemented as a plain
/// recompute-everything pass so it can serve as an independent oracle for
/// the streaming path. Samples after the first event are ignored.
std::optional<LullEvent> scan_offline(std::span<const EntropySample> samples,
                                      const MonitorConfig& cfg);

}  // namespace sentinel
