#include "sentinel/dual_check.hpp"

#include <algorithm>
#include <deque>

#include "sentinel/errors.hpp"

namespace sentinel {

std::string to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::AttackConfirmed:
            return "attack_confirmed";
        case Outcome::BenignCleared:
            return "benign_cleared";
        case Outcome::CleanContinue:
            return "clean_continue";
    }
    return "unknown";
}

PromptBundle build_flipped_prompt(const PromptBundle& original,
                                  const FlipConfig& cfg) {
    if (original.user_prompt.empty()) {
        throw EmptyPromptError("cannot flip an empty user prompt");
    }
    if (cfg.prefix_text.empty()) {
        throw DomainError("flip prefix_text must be non-empty");
    }
    PromptBundle flipped = original;
    flipped.user_prompt = cfg.prefix_text + cfg.separator + original.user_prompt;
    return flipped;
}

PassResult run_monitored_pass(StepStream& stream, const MonitorConfig& mon_cfg,
                              std::size_t token_budget) {
    LullMonitor monitor(mon_cfg);
    PassResult result;

    // Keep enough recent tokens to recover the satisfying run at the flag.
    const std::size_t keep = std::max(mon_cfg.consec_c, std::size_t{1});
    std::deque<std::string> recent;

    while (token_budget == 0 || result.tokens < token_budget) {
        std::optional<TopKStep> step = stream.next();
        if (!step.has_value()) {
            break;
        }
        ++result.tokens;
        recent.push_back(step->token);
        if (recent.size() > keep) {
            recent.pop_front();
        }

        const Observation obs = monitor.observe(entropy_of_step(*step));
        if (obs.decision == StepDecision::Halt) {
            result.event = obs.event;
            const std::size_t run =
                std::min(obs.event->run_length, recent.size());
            result.lull_tokens.assign(recent.end() - static_cast<long>(run),
                                      recent.end());
            break;
        }
    }
    return result;
}

namespace {

PassResult run_pass_wrapped(GenerationBackend& backend,
                            const GenerationRequest& req,
                            const MonitorConfig& mon_cfg,
                            std::size_t token_budget, const char* pass_name) {
    try {
        std::unique_ptr<StepStream> stream = backend.open_stream(req);
        return run_monitored_pass(*stream, mon_cfg, token_budget);
    } catch (const BackendError&) {
        throw;
    } catch (const Error& e) {
        throw BackendError(std::string(pass_name) + ": " + e.what());
    }
}

}  // namespace

DetectionVerdict run_dual_check(const PromptBundle& prompt,
                                GenerationBackend& backend,
                                const MonitorConfig& mon_cfg,
                                const FlipConfig& flip_cfg,
                                const DualCheckOptions& opts) {
    mon_cfg.validate();
    if (flip_cfg.verify_token_budget != 0 &&
        flip_cfg.verify_token_budget < mon_cfg.window_h) {
        throw DomainError("verify_token_budget must be >= the monitor window");
    }

    GenerationRequest req;
    req.prompt = prompt;
    req.topk = opts.topk;
    req.max_tokens = opts.max_tokens;

    DetectionVerdict verdict;
    const PassResult pass1 =
        run_pass_wrapped(backend, req, mon_cfg, 0, "pass 1");
    verdict.first_pass_event = pass1.event;
    verdict.tokens_generated_pass1 = pass1.tokens;

    if (!pass1.event.has_value()) {
        verdict.outcome = Outcome::CleanContinue;
        return verdict;
    }

    std::size_t budget = flip_cfg.verify_token_budget;
    if (budget == 0) {
        budget = std::max<std::size_t>(2 * pass1.tokens, 64);
    }
    budget = std::max(budget, mon_cfg.window_h);

    GenerationRequest flipped_req;
    flipped_req.prompt = build_flipped_prompt(prompt, flip_cfg);
    flipped_req.topk = opts.topk;
    flipped_req.max_tokens = budget;

    const PassResult pass2 =
        run_pass_wrapped(backend, flipped_req, mon_cfg, budget, "pass 2");
    verdict.tokens_generated_pass2 = pass2.tokens;

    bool confirmed = pass2.event.has_value();
    if (confirmed && flip_cfg.strict_token_match &&
        pass2.lull_tokens != pass1.lull_tokens) {
        // The lull does not reproduce the same token run: under strict
        // matching it does not count as a verification lull.
        confirmed = false;
    }
    if (confirmed) {
        verdict.second_pass_event = pass2.event;
        verdict.outcome = Outcome::AttackConfirmed;
    } else {
        verdict.outcome = Outcome::BenignCleared;
    }
    return verdict;
}

}  // namespace sentinel
