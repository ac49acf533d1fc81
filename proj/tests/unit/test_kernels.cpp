#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "flowlab/kernels.hpp"

using namespace flowlab;

namespace {

std::vector<double> randoms(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Kernels, ScalarMatchesDirectLoops) {
    std::mt19937_64 rng(1);
    auto a = randoms(rng, 37, 0.0, 1.0), b = randoms(rng, 37, 0.0, 1.0);
    const auto& s = kernels::scalar_table();
    double ssp = 0.0, sad = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ssp += std::sqrt(a[i] * b[i]);
        sad += std::abs(a[i] - b[i]);
    }
    EXPECT_NEAR(s.sum_sqrt_product(a.data(), b.data(), a.size()), ssp, 1e-13);
    EXPECT_NEAR(s.sum_abs_diff(a.data(), b.data(), a.size()), sad, 1e-13);

    auto w = s.weighted_sums(a.data(), b.data(), a.size(), 0.3);
    double s0 = 0, s1 = 0, s2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s0 += b[i];
        s1 += b[i] * (a[i] - 0.3);
        s2 += b[i] * (a[i] - 0.3) * (a[i] - 0.3);
    }
    EXPECT_NEAR(w.s0, s0, 1e-13);
    EXPECT_NEAR(w.s1, s1, 1e-13);
    EXPECT_NEAR(w.s2, s2, 1e-13);
}

TEST(Kernels, EveryVariantAgreesWithScalar) {
    const auto& ref = kernels::scalar_table();
    auto variants = kernels::available();
    ASSERT_FALSE(variants.empty());
    EXPECT_EQ(variants.front(), &ref);
    std::mt19937_64 rng(2);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 17u, 64u, 1001u}) {
        auto x = randoms(rng, n, -5.0, 5.0), m = randoms(rng, n, 0.0, 1.0);
        auto y = randoms(rng, n + 3, -5.0, 5.0), my = randoms(rng, n + 3, 0.0, 1.0);
        for (const auto* v : variants) {
            SCOPED_TRACE(v->name);
            EXPECT_LE(rel(v->sum_sqrt_product(m.data(), my.data(), n), ref.sum_sqrt_product(m.data(), my.data(), n)), 1e-12);
            EXPECT_LE(rel(v->sum_abs_diff(x.data(), y.data(), n), ref.sum_abs_diff(x.data(), y.data(), n)), 1e-12);
            auto a = v->weighted_sums(x.data(), m.data(), n, 0.7);
            auto b = ref.weighted_sums(x.data(), m.data(), n, 0.7);
            EXPECT_LE(rel(a.s0, b.s0), 1e-12);
            EXPECT_LE(rel(a.s1, b.s1), 1e-12);
            EXPECT_LE(rel(a.s2, b.s2), 1e-12);

            const std::size_t k = n + 3;
            std::vector<double> p1(n * k), q1(n * k), p2(n * k), q2(n * k);
            v->outer_sum_product(x.data(), m.data(), n, y.data(), my.data(), k, p1.data(), q1.data());
            ref.outer_sum_product(x.data(), m.data(), n, y.data(), my.data(), k, p2.data(), q2.data());
            for (std::size_t i = 0; i < n * k; ++i) {
                EXPECT_EQ(p1[i], p2[i]);
                EXPECT_LE(rel(q1[i], q2[i]), 1e-12);
            }
            std::vector<double> c1(k), c2(k);
            v->cutoff_cost_row(0.25, y.data(), k, 4.0, c1.data());
            ref.cutoff_cost_row(0.25, y.data(), k, 4.0, c2.data());
            for (std::size_t j = 0; j < k; ++j) {
                EXPECT_LE(rel(c1[j], c2[j]), 1e-12);
                EXPECT_LE(c1[j], 4.0);
            }
        }
    }
}

TEST(Kernels, ActiveIsOneOfTheAvailable) {
    const auto& act = kernels::active();
    bool found = false;
    for (const auto* v : kernels::available()) found = found || v == &act;
    EXPECT_TRUE(found);
}
