#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/backend.hpp"
#include "sentinel/monitor.hpp"
#include "sentinel/prompt.hpp"

namespace sentinel {

/// The rephrasing instruction prepended to the user prompt for the
/// verification pass.
inline constexpr const char* kDefaultFlipInstruction =
    "Reimagine the following instruction creatively but keep its core "
    "meaning and intent";

struct FlipConfig {
    std::string prefix_text = kDefaultFlipInstruction;
    std::string separator = ": ";

    /// Cap on second-pass length. 0 selects the automatic rule
    /// max(2 * pass-1 tokens, 64); an explicit value must be >= the
    /// monitor window.
    std::size_t verify_token_budget = 0;

    /// When set, a second-pass lull confirms the attack only if its
    /// satisfying run reproduces the first pass's token string. A
    /// non-matching lull is treated as no verification lull.
    bool strict_token_match = false;
};

enum class Outcome { AttackConfirmed, BenignCleared, CleanContinue };

std::string to_string(Outcome outcome);

/// Result of a dual-check session.
///   AttackConfirmed: lull flagged in both passes.
///   BenignCleared:   pass 1 flagged, pass 2 ran lull-free.
///   CleanContinue:   pass 1 never flagged; pass 2 never ran.
struct DetectionVerdict {
    Outcome outcome = Outcome::CleanContinue;
    std::optional<LullEvent> first_pass_event;
    std::optional<LullEvent> second_pass_event;
    std::size_t tokens_generated_pass1 = 0;
    std::size_t tokens_generated_pass2 = 0;
};

/// Returns `original` with the flip instruction prepended to the user
/// prompt (prefix + separator + user prompt). System prompt and external
/// data pass through untouched, so any embedded trigger survives.
/// Throws EmptyPromptError when the user prompt is empty.
PromptBundle build_flipped_prompt(const PromptBundle& original,
                                  const FlipConfig& cfg);

/// One monitored generation pass, shared by the dual check and the
/// single-check ablation.
struct PassResult {
    std::optional<LullEvent> event;
    std::size_t tokens = 0;
    /// Tokens of the satisfying run at the flag (empty when no event).
    std::vector<std::string> lull_tokens;
};

/// Pulls steps from the stream through a fresh monitor, stopping at the
/// first flag, at `token_budget` steps (0 = unbounded), or at stream end.
PassResult run_monitored_pass(StepStream& stream, const MonitorConfig& mon_cfg,
                              std::size_t token_budget);

struct DualCheckOptions {
    int topk = 20;
    std::size_t max_tokens = 4096;
};

/// The full two-pass protocol: monitor the original generation; on a flag,
/// abort it, rerun the flipped prompt under a fresh monitor with early
/// halt, and assemble the verdict. Backend failures rethrow as
/// BackendError tagged with the pass; an exhausted second-pass budget is
/// not an error and clears the sample.
DetectionVerdict run_dual_check(const PromptBundle& prompt,
                                GenerationBackend& backend,
                                const MonitorConfig& mon_cfg,
                                const FlipConfig& flip_cfg,
                                const DualCheckOptions& opts = {});

}  // namespace sentinel
