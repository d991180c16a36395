#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sentinel/errors.hpp"

namespace sentinel {

/// One (token, probability) alternative of a decoding step.
struct TokenProb {
    std::string token;
    double prob = 0.0;
};

/// One decoding step as visible to a black-box client: the emitted token
/// plus the top-k alternatives sorted non-increasing by probability.
struct TopKStep {
    std::string token;
    std::vector<TokenProb> topk;
    bool is_eos = false;
    std::size_t step_index = 0;
};

/// Top-k probabilities rescaled to unit mass, order preserved.
struct NormalizedDist {
    std::vector<double> q;
};

/// Per-step entropy in nats, carrying the step identity for the monitor.
struct EntropySample {
    double entropy = 0.0;
    std::size_t step_index = 0;
    bool is_eos = false;
};

/// Checks the structural invariants of a TopKStep: k >= 2, probabilities
/// finite and in [0,1], sorted non-increasing. Throws DomainError or
/// NonFiniteError on violation.
void validate_topk_step(const TopKStep& step);

/// Rescales the step's raw top-k probabilities to sum to 1.
/// Throws ZeroMassError when the raw mass is <= 0 and NonFiniteError when
/// any probability is NaN or infinite. Zero entries are preserved.
NormalizedDist normalize_topk(const TopKStep& step);

/// Shannon entropy -sum(q * ln q) in nats, with 0 * ln 0 := 0.
double shannon_entropy(const NormalizedDist& dist);

/// Closed-form ceiling for the per-step entropy when one token holds mass
/// 1-epsilon and the remaining epsilon spreads uniformly over k-1 tokens:
///   -(1-eps)*ln(1-eps) - eps*ln(eps) + eps*ln(k-1)
/// Throws DomainError unless 0 < epsilon < 1 and k >= 2.
double entropy_upper_bound(double epsilon, int k);

/// Entropy of one step via the dispatched kernel; validates mass and
/// finiteness like normalize_topk.
EntropySample entropy_of_step(const TopKStep& step);

}  // namespace sentinel
