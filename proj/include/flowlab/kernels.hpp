#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Dense inner loops shared by the measure algebra and the metrics. Each kernel has a
// scalar reference and (on x86-64) an AVX2/FMA variant picked at runtime. Set
// FLOWLAB_SIMD=scalar to force the reference path.
namespace flowlab::kernels {

struct Sums3 {
    double s0 = 0.0;  // sum m
    double s1 = 0.0;  // sum m (x - shift)
    double s2 = 0.0;  // sum m (x - shift)^2
};

struct Table {
    const char* name;
    double (*sum_sqrt_product)(const double* a, const double* b, std::size_t n);
    double (*sum_abs_diff)(const double* a, const double* b, std::size_t n);
    Sums3 (*weighted_sums)(const double* x, const double* m, std::size_t n, double shift);
    // out_pos[i*k + j] = x[i] + y[j], out_mass[i*k + j] = mx[i] * my[j]
    void (*outer_sum_product)(const double* x, const double* mx, std::size_t n, const double* y,
                              const double* my, std::size_t k, double* out_pos, double* out_mass);
    // out[j] = min((x - y[j])^2, cap)
    void (*cutoff_cost_row)(double x, const double* y, std::size_t k, double cap, double* out);
};

const Table& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks the instructions.
const Table* avx2_table();

// Table used by the library. Resolved once from the CPU and FLOWLAB_SIMD.
const Table& active();

// Names of every variant usable on this machine, reference first.
std::vector<const Table*> available();

}  // namespace flowlab::kernels
