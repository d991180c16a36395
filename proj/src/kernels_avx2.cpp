// AVX2+FMA entropy kernel. Compiled with -mavx2 -mfma; callers must gate on
// avx2_available().

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cfloat>
#include <cstdint>
#include <limits>

#include "sentinel/kernels.hpp"

namespace sentinel::kernels {

namespace {

// ln2 split so that e * kLn2Hi is exact for any window of exponents.
constexpr double kLn2Hi = 0.693359375;
constexpr double kLn2Lo = -2.121944400546905827679e-4;
constexpr double kSqrtHalf = 0.70710678118654752440;

// atanh series coefficients 1/3, 1/5, ..., 1/25 for
// ln(m) = 2u * (1 + z/3 + z^2/5 + ...), u = (m-1)/(m+1), z = u^2.
// With m in [sqrt(1/2), sqrt(2)), z < 0.0295 and the truncation error is
// far below one ulp.
constexpr double kAtanhCoeff[12] = {
    1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,  1.0 / 9.0,  1.0 / 11.0, 1.0 / 13.0,
    1.0 / 15.0, 1.0 / 17.0, 1.0 / 19.0, 1.0 / 21.0, 1.0 / 23.0, 1.0 / 25.0,
};

// Natural log of four positive normal doubles; lanes holding zeros or
// subnormals produce garbage and must be masked by the caller.
inline __m256d log_positive(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);

    // Exponent field as a double via the 2^52 bias trick (AVX2 has no
    // 64-bit int -> double conversion).
    const __m256i raw_exp = _mm256_srli_epi64(bits, 52);
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
    const __m256d exp_biased = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(raw_exp, magic)),
        _mm256_set1_pd(4503599627370496.0));
    __m256d e = _mm256_sub_pd(exp_biased, _mm256_set1_pd(1022.0));

    // Mantissa remapped to [0.5, 1).
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
    const __m256i half_exp = _mm256_set1_epi64x(0x3FE0000000000000LL);
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_exp));

    // Fold into [sqrt(1/2), sqrt(2)).
    const __m256d below = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrtHalf), _CMP_LT_OQ);
    m = _mm256_add_pd(m, _mm256_and_pd(below, m));
    e = _mm256_sub_pd(e, _mm256_and_pd(below, _mm256_set1_pd(1.0)));

    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d u =
        _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d z = _mm256_mul_pd(u, u);

    __m256d poly = _mm256_set1_pd(kAtanhCoeff[11]);
    for (int i = 10; i >= 0; --i) {
        poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(kAtanhCoeff[i]));
    }
    poly = _mm256_mul_pd(poly, z);

    const __m256d two_u = _mm256_add_pd(u, u);
    const __m256d ln_m = _mm256_fmadd_pd(two_u, poly, two_u);

    return _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Hi),
                           _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Lo), ln_m));
}

inline double horizontal_sum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d sum2 = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2)));
}

inline __m256i tail_mask(std::size_t n) {
    alignas(32) static const std::int64_t kMaskTable[8] = {
        -1, -1, -1, -1, 0, 0, 0, 0,
    };
    return _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(kMaskTable + (4 - n)));
}

}  // namespace

void entropy_rows_avx2(const double* probs, std::size_t rows, std::size_t k,
                       double* out) {
    const std::size_t full = k / 4 * 4;
    const std::size_t tail = k - full;
    const __m256i tmask = tail_mask(tail);

    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = probs + r * k;

        __m256d vsum = _mm256_setzero_pd();
        for (std::size_t i = 0; i < full; i += 4) {
            vsum = _mm256_add_pd(vsum, _mm256_loadu_pd(row + i));
        }
        if (tail != 0) {
            vsum = _mm256_add_pd(vsum, _mm256_maskload_pd(row + full, tmask));
        }
        const double mass = horizontal_sum(vsum);
        if (!(mass > 0.0)) {
            out[r] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }

        const __m256d vmass = _mm256_set1_pd(mass);
        const __m256d qmin = _mm256_set1_pd(DBL_MIN);
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t i = 0; i < k; i += 4) {
            __m256d p;
            if (i + 4 <= k) {
                p = _mm256_loadu_pd(row + i);
            } else {
                p = _mm256_maskload_pd(row + i, tmask);
            }
            const __m256d q = _mm256_div_pd(p, vmass);
            const __m256d valid = _mm256_cmp_pd(q, qmin, _CMP_GE_OQ);
            const __m256d contrib =
                _mm256_and_pd(valid, _mm256_mul_pd(q, log_positive(q)));
            acc = _mm256_add_pd(acc, contrib);
        }
        out[r] = -horizontal_sum(acc);
    }
}

}  // namespace sentinel::kernels

#endif  // x86-64
