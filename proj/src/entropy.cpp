#include "sentinel/entropy.hpp"

#include <cfloat>
#include <cmath>

#include "sentinel/kernels.hpp"

namespace sentinel {

void validate_topk_step(const TopKStep& step) {
    if (step.topk.size() < 2) {
        throw DomainError("top-k list needs at least 2 entries, got " +
                          std::to_string(step.topk.size()));
    }
    double prev = 1.0;
    bool first = true;
    for (const TokenProb& tp : step.topk) {
        if (!std::isfinite(tp.prob)) {
            throw NonFiniteError("non-finite probability in top-k list");
        }
        if (tp.prob < 0.0 || tp.prob > 1.0) {
            throw DomainError("probability out of [0,1]: " +
                              std::to_string(tp.prob));
        }
        if (!first && tp.prob > prev) {
            throw DomainError("top-k list not sorted non-increasing");
        }
        prev = tp.prob;
        first = false;
    }
}

NormalizedDist normalize_topk(const TopKStep& step) {
    double mass = 0.0;
    for (const TokenProb& tp : step.topk) {
        if (!std::isfinite(tp.prob)) {
            throw NonFiniteError("non-finite probability in top-k list");
        }
        mass += tp.prob;
    }
    if (!(mass > 0.0)) {
        throw ZeroMassError("top-k probabilities sum to zero");
    }
    NormalizedDist dist;
    dist.q.reserve(step.topk.size());
    for (const TokenProb& tp : step.topk) {
        dist.q.push_back(tp.prob / mass);
    }
    return dist;
}

double shannon_entropy(const NormalizedDist& dist) {
    double acc = 0.0;
    for (double q : dist.q) {
        if (q > 0.0) {
            acc += q * std::log(q);
        }
    }
    return -acc;
}

double entropy_upper_bound(double epsilon, int k) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw DomainError("epsilon must lie in (0,1), got " +
                          std::to_string(epsilon));
    }
    if (k < 2) {
        throw DomainError("k must be at least 2, got " + std::to_string(k));
    }
    // log1p keeps the (1-eps) term accurate for tiny eps.
    return -(1.0 - epsilon) * std::log1p(-epsilon) -
           epsilon * std::log(epsilon) +
           epsilon * std::log(static_cast<double>(k - 1));
}

EntropySample entropy_of_step(const TopKStep& step) {
    constexpr std::size_t kStackK = 64;
    double stack_buf[kStackK];
    std::vector<double> heap_buf;

    const std::size_t k = step.topk.size();
    double* buf = stack_buf;
    if (k > kStackK) {
        heap_buf.resize(k);
        buf = heap_buf.data();
    }

    double mass = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double p = step.topk[i].prob;
        if (!std::isfinite(p)) {
            throw NonFiniteError("non-finite probability in top-k list");
        }
        buf[i] = p;
        mass += p;
    }
    if (!(mass > 0.0)) {
        throw ZeroMassError("top-k probabilities sum to zero");
    }

    double entropy = 0.0;
    kernels::entropy_rows(buf, 1, k, &entropy);
    return EntropySample{entropy, step.step_index, step.is_eos};
}

}  // namespace sentinel
