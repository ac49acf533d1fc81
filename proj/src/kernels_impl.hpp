#pragma once

#include "flowlab/kernels.hpp"

namespace flowlab::kernels {

namespace scalar {
double sum_sqrt_product(const double* a, const double* b, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
Sums3 weighted_sums(const double* x, const double* m, std::size_t n, double shift);
void outer_sum_product(const double* x, const double* mx, std::size_t n, const double* y, const double* my,
                       std::size_t k, double* out_pos, double* out_mass);
void cutoff_cost_row(double x, const double* y, std::size_t k, double cap, double* out);
}  // namespace scalar

#if defined(__x86_64__) || defined(__i386__)
#define FLOWLAB_HAVE_AVX2_VARIANT 1
namespace avx2 {
double sum_sqrt_product(const double* a, const double* b, std::size_t n);
double sum_abs_diff(const double* a, const double* b, std::size_t n);
Sums3 weighted_sums(const double* x, const double* m, std::size_t n, double shift);
void outer_sum_product(const double* x, const double* mx, std::size_t n, const double* y, const double* my,
                       std::size_t k, double* out_pos, double* out_mass);
void cutoff_cost_row(double x, const double* y, std::size_t k, double cap, double* out);
}  // namespace avx2
#endif

}  // namespace flowlab::kernels
