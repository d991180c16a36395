#include "sentinel/monitor.hpp"

#include <cmath>
#include <string>

namespace sentinel {

void MonitorConfig::validate() const {
    if (window_h < 1) {
        throw DomainError("window_h must be >= 1");
    }
    if (consec_c < 1) {
        throw DomainError("consec_c must be >= 1");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw DomainError("gamma must be a positive finite value");
    }
    if (stability_epsilon < 0.0 || !std::isfinite(stability_epsilon)) {
        throw DomainError("stability_epsilon must be non-negative");
    }
}

bool check_low_magnitude(const WindowStats& stats, const MonitorConfig& cfg) {
    if (!stats.filled) {
        throw WindowNotFilledError("window not filled");
    }
    return stats.mean <= cfg.gamma;
}

bool check_stable_trend(double curr_mean, const WindowStats& prev, double eps) {
    if (!prev.filled) {
        throw WindowNotFilledError("previous window not filled");
    }
    return prev.mean - prev.std_dev - eps <= curr_mean &&
           curr_mean <= prev.mean + prev.std_dev + eps;
}

LullMonitor::LullMonitor(MonitorConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    ring_.assign(cfg_.window_h, 0.0);
}

void LullMonitor::reset() {
    ring_.assign(cfg_.window_h, 0.0);
    count_ = 0;
    have_last_step_ = false;
    last_step_ = 0;
    prev_stats_.reset();
    consec_ = 0;
    event_.reset();
}

WindowStats LullMonitor::window_stats() const {
    const std::size_t h = cfg_.window_h;
    double sum = 0.0;
    for (double e : ring_) {
        sum += e;
    }
    const double mean = sum / static_cast<double>(h);
    double sq = 0.0;
    for (double e : ring_) {
        const double d = e - mean;
        sq += d * d;
    }
    return WindowStats{mean, std::sqrt(sq / static_cast<double>(h)), true};
}

Observation LullMonitor::observe(const EntropySample& sample) {
    if (event_.has_value()) {
        throw StateFrozenError("monitor already flagged at step " +
                               std::to_string(event_->flagged_step));
    }
    if (have_last_step_ && sample.step_index <= last_step_) {
        throw OutOfOrderError("step_index " + std::to_string(sample.step_index) +
                              " not after " + std::to_string(last_step_));
    }
    have_last_step_ = true;
    last_step_ = sample.step_index;

    ring_[count_ % cfg_.window_h] = sample.entropy;
    ++count_;

    Observation obs;
    if (count_ < cfg_.window_h) {
        return obs;
    }

    const WindowStats stats = window_stats();
    obs.stats = stats;
    obs.low_magnitude = check_low_magnitude(stats, cfg_);
    // No preceding window at the first evaluable step: vacuously stable.
    obs.stable_trend =
        !prev_stats_.has_value() ||
        check_stable_trend(stats.mean, *prev_stats_, cfg_.stability_epsilon);

    if (obs.low_magnitude && obs.stable_trend) {
        ++consec_;
    } else {
        consec_ = 0;
    }
    prev_stats_ = stats;

    if (consec_ >= cfg_.consec_c) {
        event_ = LullEvent{LullKind::Sustained, sample.step_index, stats.mean,
                           consec_};
    } else if (sample.is_eos && consec_ >= 1) {
        event_ = LullEvent{LullKind::Completed, sample.step_index, stats.mean,
                           consec_};
    }

    if (event_.has_value()) {
        obs.decision = StepDecision::Halt;
        obs.event = event_;
    }
    return obs;
}

// Deliberately naive whole-sequence pass: window statistics are recomputed
// from scratch at every step by slicing the raw array, with no shared state
// machinery, so this stays an independent oracle for the streaming monitor.
std::optional<LullEvent> scan_offline(std::span<const EntropySample> samples,
                                      const MonitorConfig& cfg) {
    cfg.validate();
    const std::size_t h = cfg.window_h;
    const std::size_t n = samples.size();

    bool have_prev = false;
    double prev_mean = 0.0;
    double prev_std = 0.0;
    std::size_t consec = 0;

    for (std::size_t t = 0; t < n; ++t) {
        if (t + 1 < h) {
            continue;
        }
        double sum = 0.0;
        for (std::size_t j = t + 1 - h; j <= t; ++j) {
            sum += samples[j].entropy;
        }
        const double mean = sum / static_cast<double>(h);
        double sq = 0.0;
        for (std::size_t j = t + 1 - h; j <= t; ++j) {
            const double d = samples[j].entropy - mean;
            sq += d * d;
        }
        const double sd = std::sqrt(sq / static_cast<double>(h));

        const bool low = mean <= cfg.gamma;
        const bool stable =
            !have_prev ||
            (prev_mean - prev_std - cfg.stability_epsilon <= mean &&
             mean <= prev_mean + prev_std + cfg.stability_epsilon);

        if (low && stable) {
            ++consec;
        } else {
            consec = 0;
        }
        have_prev = true;
        prev_mean = mean;
        prev_std = sd;

        if (consec >= cfg.consec_c) {
            return LullEvent{LullKind::Sustained, samples[t].step_index, mean,
                             consec};
        }
        if (samples[t].is_eos && consec >= 1) {
            return LullEvent{LullKind::Completed, samples[t].step_index, mean,
                             consec};
        }
    }
    return std::nullopt;
}

}  // namespace sentinel
