#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sentinel/baselines.hpp"
#include "sentinel/dual_check.hpp"
#include "sentinel/synth.hpp"
#include "sentinel/trace_backend.hpp"

namespace sentinel {

enum class Detector { DualSentinel, ConfGuard, LullOnly };

std::string to_string(Detector detector);
Detector detector_from_string(const std::string& text);

/// Per-trace outcome. For ConfGuard and LullOnly the verdict encodes halt
/// status (AttackConfirmed on halt/flag, CleanContinue otherwise) and the
/// second-pass fields stay empty. Token counts stand in for wall time.
struct EvalRecord {
    std::string trace_id;
    TraceLabel label = TraceLabel::Benign;
    DetectionVerdict verdict;
    bool positive = false;
    std::size_t wall_tokens_defended = 0;
    std::size_t wall_tokens_undefended = 0;
};

struct MetricsReport {
    Detector detector = Detector::DualSentinel;
    struct Counts {
        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    } counts;
    /// Absent (not zero) when the denominator class is empty.
    std::optional<double> tpr;
    std::optional<double> fpr;
    std::optional<double> atgr_benign;
    std::optional<double> atgr_malicious;
    std::vector<EvalRecord> records;
};

/// A labeled corpus: the replay store plus the prompt cases that key it.
struct EvalCorpus {
    TraceBackend backend;
    std::vector<PromptCase> prompts;

    static EvalCorpus load(const std::filesystem::path& traces_path,
                           const std::filesystem::path& prompts_path);
    static EvalCorpus from_synth(SynthCorpus corpus);
};

struct EvalConfig {
    MonitorConfig monitor;
    FlipConfig flip;
    ConfGuardConfig confguard;
    int topk = 20;
};

/// Runs the detector over every labeled prompt. A trace counts positive
/// when the dual check confirms (DualSentinel) or the single pass halts
/// (others). Throws EmptyCorpusError on an empty prompt set and
/// MissingFlippedTraceError when DualSentinel lacks a flipped pair.
MetricsReport run_eval(EvalCorpus& corpus, Detector detector,
                       const EvalConfig& cfg);

/// Mean defended over mean undefended token count, per class:
/// (benign, malicious). Throws EmptyClassError when either class is empty.
std::pair<double, double> compute_atgr(std::span<const EvalRecord> records);

/// Lossless JSON round-trip of the full report (summary + per-trace rows).
std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);

void write_report_file(const std::filesystem::path& path,
                       const MetricsReport& report);

/// Two-line CSV of the confusion matrix: header tp,fp,tn,fn.
void write_confusion_csv(const std::filesystem::path& path,
                         const MetricsReport& report);

}  // namespace sentinel
