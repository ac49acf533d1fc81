#include "kernels_impl.hpp"

#ifdef FLOWLAB_HAVE_AVX2_VARIANT

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#define FLOWLAB_AVX2 __attribute__((target("avx2,fma")))

namespace flowlab::kernels::avx2 {

namespace {

FLOWLAB_AVX2 inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

FLOWLAB_AVX2 double sum_sqrt_product(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_sqrt_pd(p));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::sqrt(a[i] * b[i]);
    return s;
}

FLOWLAB_AVX2 double sum_abs_diff(const double* a, const double* b, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

FLOWLAB_AVX2 Sums3 weighted_sums(const double* x, const double* m, std::size_t n, double shift) {
    const __m256d sh = _mm256_set1_pd(shift);
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd(), a2 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d mm = _mm256_loadu_pd(m + i);
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), sh);
        __m256d md = _mm256_mul_pd(mm, d);
        a0 = _mm256_add_pd(a0, mm);
        a1 = _mm256_add_pd(a1, md);
        a2 = _mm256_fmadd_pd(md, d, a2);
    }
    Sums3 r{hsum(a0), hsum(a1), hsum(a2)};
    for (; i < n; ++i) {
        double d = x[i] - shift;
        r.s0 += m[i];
        r.s1 += m[i] * d;
        r.s2 += m[i] * d * d;
    }
    return r;
}

FLOWLAB_AVX2 void outer_sum_product(const double* x, const double* mx, std::size_t n, const double* y,
                                    const double* my, std::size_t k, double* out_pos, double* out_mass) {
    for (std::size_t i = 0; i < n; ++i) {
        const __m256d xi = _mm256_set1_pd(x[i]);
        const __m256d mi = _mm256_set1_pd(mx[i]);
        double* op = out_pos + i * k;
        double* om = out_mass + i * k;
        std::size_t j = 0;
        for (; j + 4 <= k; j += 4) {
            _mm256_storeu_pd(op + j, _mm256_add_pd(xi, _mm256_loadu_pd(y + j)));
            _mm256_storeu_pd(om + j, _mm256_mul_pd(mi, _mm256_loadu_pd(my + j)));
        }
        for (; j < k; ++j) {
            op[j] = x[i] + y[j];
            om[j] = mx[i] * my[j];
        }
    }
}

FLOWLAB_AVX2 void cutoff_cost_row(double x, const double* y, std::size_t k, double cap, double* out) {
    const __m256d xv = _mm256_set1_pd(x);
    const __m256d cv = _mm256_set1_pd(cap);
    std::size_t j = 0;
    for (; j + 4 <= k; j += 4) {
        __m256d d = _mm256_sub_pd(xv, _mm256_loadu_pd(y + j));
        _mm256_storeu_pd(out + j, _mm256_min_pd(_mm256_mul_pd(d, d), cv));
    }
    for (; j < k; ++j) {
        double d = x - y[j];
        out[j] = std::min(d * d, cap);
    }
}

}  // namespace flowlab::kernels::avx2

#endif
