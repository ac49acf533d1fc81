#include <cstdlib>
#include <cstring>

#include "flowlab/errors.hpp"
#include "kernels_impl.hpp"

namespace flowlab::kernels {

namespace {

const Table kScalar{"scalar", scalar::sum_sqrt_product, scalar::sum_abs_diff, scalar::weighted_sums,
                    scalar::outer_sum_product, scalar::cutoff_cost_row};

#ifdef FLOWLAB_HAVE_AVX2_VARIANT
const Table kAvx2{"avx2", avx2::sum_sqrt_product, avx2::sum_abs_diff, avx2::weighted_sums,
                  avx2::outer_sum_product, avx2::cutoff_cost_row};
#endif

const Table& resolve() {
    const char* env = std::getenv("FLOWLAB_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return kScalar;
    if (const Table* t = avx2_table()) return *t;
    return kScalar;
}

}  // namespace

const Table& scalar_table() { return kScalar; }

const Table* avx2_table() {
#ifdef FLOWLAB_HAVE_AVX2_VARIANT
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const Table& active() {
    static const Table& t = resolve();
    return t;
}

std::vector<const Table*> available() {
    std::vector<const Table*> out{&kScalar};
    if (const Table* t = avx2_table()) out.push_back(t);
    return out;
}

}  // namespace flowlab::kernels
