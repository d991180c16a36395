#include <atomic>

#include "sentinel/errors.hpp"
#include "sentinel/kernels.hpp"

namespace sentinel::kernels {

namespace {

using KernelFn = void (*)(const double*, std::size_t, std::size_t, double*);

bool detect_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

KernelFn pick(Impl impl) {
    switch (impl) {
        case Impl::Scalar:
            return &entropy_rows_scalar;
        case Impl::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return &entropy_rows_avx2;
#else
            return nullptr;
#endif
        case Impl::Auto:
        default:
#if defined(__x86_64__) || defined(_M_X64)
            if (detect_avx2()) {
                return &entropy_rows_avx2;
            }
#endif
            return &entropy_rows_scalar;
    }
}

std::atomic<KernelFn> g_kernel{nullptr};

KernelFn active() {
    KernelFn fn = g_kernel.load(std::memory_order_acquire);
    if (fn == nullptr) {
        fn = pick(Impl::Auto);
        g_kernel.store(fn, std::memory_order_release);
    }
    return fn;
}

}  // namespace

bool avx2_available() { return detect_avx2(); }

void set_impl(Impl impl) {
    if (impl == Impl::Avx2 && !detect_avx2()) {
        throw DomainError("AVX2 kernel not supported on this CPU");
    }
    g_kernel.store(pick(impl), std::memory_order_release);
}

std::string_view active_impl_name() {
#if defined(__x86_64__) || defined(_M_X64)
    if (active() == &entropy_rows_avx2) {
        return "avx2";
    }
#endif
    return "scalar";
}

void entropy_rows(const double* probs, std::size_t rows, std::size_t k,
                  double* out) {
    active()(probs, rows, k, out);
}

}  // namespace sentinel::kernels
