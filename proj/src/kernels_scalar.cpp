#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"

namespace flowlab::kernels::scalar {

double sum_sqrt_product(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::sqrt(a[i] * b[i]);
    return s;
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

Sums3 weighted_sums(const double* x, const double* m, std::size_t n, double shift) {
    Sums3 r;
    for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - shift;
        r.s0 += m[i];
        r.s1 += m[i] * d;
        r.s2 += m[i] * d * d;
    }
    return r;
}

void outer_sum_product(const double* x, const double* mx, std::size_t n, const double* y, const double* my,
                       std::size_t k, double* out_pos, double* out_mass) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            out_pos[i * k + j] = x[i] + y[j];
            out_mass[i * k + j] = mx[i] * my[j];
        }
    }
}

void cutoff_cost_row(double x, const double* y, std::size_t k, double cap, double* out) {
    for (std::size_t j = 0; j < k; ++j) {
        double d = x - y[j];
        out[j] = std::min(d * d, cap);
    }
}

}  // namespace flowlab::kernels::scalar
