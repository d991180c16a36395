#pragma once

#include <cstddef>
#include <string_view>

// Batched entropy kernels. Each row of `probs` holds the k raw (linear
// scale) probabilities of one decoding step; the kernel renormalizes the
// row to unit mass and writes its Shannon entropy in nats to `out`.
//
// A scalar reference implementation is always available; on x86-64 an AVX2
// variant is selected at runtime when the CPU supports AVX2+FMA. Both
// variants follow the same arithmetic route (divide by the row sum, then
// accumulate -q*ln q with the 0*ln 0 := 0 convention); they differ only in
// the log evaluation, and are equivalence-tested against each other.

namespace sentinel::kernels {

enum class Impl {
    Auto,    // pick the best supported variant (default)
    Scalar,
    Avx2,
};

/// Entropy of each of `rows` rows of `k` raw probabilities (row-major).
/// Rows with non-positive mass produce NaN; callers validate inputs first.
void entropy_rows(const double* probs, std::size_t rows, std::size_t k,
                  double* out);

/// Scalar reference kernel (libm log).
void entropy_rows_scalar(const double* probs, std::size_t rows, std::size_t k,
                         double* out);

#if defined(__x86_64__) || defined(_M_X64)
/// AVX2+FMA kernel. Only call when avx2_available() is true.
void entropy_rows_avx2(const double* probs, std::size_t rows, std::size_t k,
                       double* out);
#endif

/// True when the running CPU supports the AVX2 kernel.
bool avx2_available();

/// Force a specific implementation (Impl::Auto restores runtime selection).
/// Throws DomainError when the requested variant is unsupported here.
void set_impl(Impl impl);

/// Name of the implementation entropy_rows currently dispatches to.
std::string_view active_impl_name();

}  // namespace sentinel::kernels
