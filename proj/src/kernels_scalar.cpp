#include <cfloat>
#include <cmath>
#include <limits>

#include "sentinel/kernels.hpp"

namespace sentinel::kernels {

void entropy_rows_scalar(const double* probs, std::size_t rows, std::size_t k,
                         double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = probs + r * k;
        double mass = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            mass += row[i];
        }
        if (!(mass > 0.0)) {
            out[r] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double q = row[i] / mass;
            if (q >= DBL_MIN) {
                acc += q * std::log(q);
            }
        }
        out[r] = -acc;
    }
}

}  // namespace sentinel::kernels
