#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flowlab/errors.hpp"
#include "flowlab/measure.hpp"
#include "oracles.hpp"

using namespace flowlab;

TEST(Measure, CanonicalFormMergesAndSorts) {
    DiscreteMeasure mu({{2.0, 0.25}, {0.0, 0.25}, {2.0, 0.5}, {1.0, 0.0}});
    ASSERT_EQ(mu.size(), 2u);
    EXPECT_EQ(mu.atoms()[0].pos, 0.0);
    EXPECT_DOUBLE_EQ(mu.mass_at(2.0), 0.75);
    EXPECT_EQ(mu.mass_at(1.0), 0.0);
    EXPECT_TRUE(mu.is_probability());
}

TEST(Measure, RejectsBadAtoms) {
    EXPECT_THROW(DiscreteMeasure({{0.0, -0.1}}), DomainError);
    EXPECT_THROW(DiscreteMeasure({{NAN, 0.1}}), DomainError);
    EXPECT_THROW(DiscreteMeasure({{0.0, 1.0}}, -1.0), DomainError);
    EXPECT_THROW(normalize(DiscreteMeasure::zero()), DomainError);
}

TEST(Measure, ConvolutionMatchesOracle) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        auto mu = oracle::random_measure(rng, 6, -3, 3);
        auto nu = oracle::random_measure(rng, 6, -3, 3);
        auto got = oracle::grid(convolve(mu, nu));
        auto want = oracle::convolve(oracle::grid(mu), oracle::grid(nu));
        EXPECT_LE(oracle::l1(got, want), 1e-12);
    }
}

TEST(Measure, ConvolutionPowerMatchesRepeatedConvolution) {
    DiscreteMeasure mu({{0.0, 0.3}, {1.0, 0.7}});
    auto p = convolve_power(mu, 7);
    // Binomial(7, 0.7)
    for (int k = 0; k <= 7; ++k) {
        double c = std::tgamma(8.0) / (std::tgamma(k + 1.0) * std::tgamma(8.0 - k));
        EXPECT_NEAR(p.mass_at(k), c * std::pow(0.7, k) * std::pow(0.3, 7 - k), 1e-14);
    }
    EXPECT_EQ(convolve_power(mu, 0), DiscreteMeasure::dirac(0.0));
    EXPECT_THROW(convolve_power(mu, -1), DomainError);
}

TEST(Measure, DefectPropagatesThroughConvolution) {
    DiscreteMeasure a({{0.0, 0.9}}, 0.1), b({{1.0, 0.8}}, 0.2);
    auto c = convolve(a, b);
    EXPECT_NEAR(c.total_mass(), 0.72, 1e-15);
    EXPECT_NEAR(c.defect(), 0.1 * 0.8 + 0.2 * 0.9 + 0.02, 1e-15);
    EXPECT_TRUE(c.is_probability());
}

TEST(Measure, MomentsAndTransforms) {
    DiscreteMeasure mu({{-1.0, 0.25}, {3.0, 0.75}});
    auto m = moments(mu);
    EXPECT_DOUBLE_EQ(m.mass, 1.0);
    EXPECT_DOUBLE_EQ(m.mean, 2.0);
    EXPECT_NEAR(m.variance, 0.25 * 9 + 0.75 * 1, 1e-14);
    EXPECT_NEAR(second_moment_about(mu, 0.0), 0.25 + 0.75 * 9, 1e-14);
    auto r = reflect(translate(mu, 1.0));
    EXPECT_DOUBLE_EQ(r.mass_at(-4.0), 0.75);
    auto cf = char_fn(mu, 0.7);
    EXPECT_NEAR(cf.real(), 0.25 * std::cos(-0.7) + 0.75 * std::cos(2.1), 1e-15);
    EXPECT_NEAR(cf.imag(), 0.25 * std::sin(-0.7) + 0.75 * std::sin(2.1), 1e-15);
}

TEST(Measure, RestrictAndDomination) {
    DiscreteMeasure mu({{0.0, 0.5}, {1.0, 0.3}, {2.0, 0.2}});
    auto r = restrict(mu, {0.5, 2.0, true, true});
    EXPECT_EQ(r.size(), 2u);
    EXPECT_TRUE(r.dominated_by(mu));
    EXPECT_FALSE(mu.dominated_by(r));
    EXPECT_FALSE(r.dominated_by(scale_mass(mu, 0.5)));
    EXPECT_FALSE((Interval{0.0, 1.0, true, false}).contains(1.0));
}

TEST(Measure, PoissonPmfAndTail) {
    for (double lam : {0.1, 1.0, 4.5, 30.0}) {
        double sum = 0.0;
        for (long k = 0; k <= 5; ++k) {
            EXPECT_NEAR(poisson_pmf(lam, k), oracle::poisson_pmf(lam, k), 1e-14 * std::max(1.0, 1.0 / oracle::poisson_pmf(lam, k)) * oracle::poisson_pmf(lam, k) + 1e-300);
            sum += oracle::poisson_pmf(lam, k);
        }
        EXPECT_NEAR(poisson_tail(lam, 5), 1.0 - sum, 1e-12);
    }
    EXPECT_EQ(poisson_tail(2.0, -1), 1.0);
}

TEST(Measure, CompoundPoissonMatchesSeriesOracle) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        auto mu = oracle::random_measure(rng, 3, 0, 2, 1.5);
        auto got = compound_poisson(mu, 1e-13);
        auto want = oracle::compound_poisson(oracle::grid(mu), 30);
        EXPECT_LE(oracle::l1(oracle::grid(got), want), 1e-11);
        EXPECT_LE(got.defect(), 1e-13);
        EXPECT_TRUE(got.is_probability(1e-12));
    }
}

TEST(Measure, CompoundPoissonCharFnClosedForm) {
    DiscreteMeasure mu({{1.0, 0.4}, {2.5, 0.6}});
    auto e = compound_poisson(mu, 1e-15);
    for (double w : {0.3, 1.0, 2.7}) {
        auto a = char_fn(e, w), b = compound_poisson_char_fn(mu, w);
        EXPECT_NEAR(std::abs(a - b), 0.0, 1e-13);
    }
}

TEST(Measure, TwoPointAndRhoStates) {
    auto g = two_point_gamma(std::log(3.0));
    EXPECT_NEAR(g.mass_at(0.0), 0.75, 1e-15);
    EXPECT_NEAR(g.mass_at(std::log(3.0)), 0.25, 1e-15);
    auto r = rho_state({std::log(2.0), std::log(4.0)});
    EXPECT_NEAR(r.mass_at(0.0), 1.0 / 1.75, 1e-15);
    EXPECT_TRUE(r.is_probability());
    EXPECT_THROW(two_point_gamma(-1.0), DomainError);
}

TEST(Measure, IndexWindows) {
    EXPECT_EQ(index_window(IndexDomain::Naturals, 3), (std::vector<long>{1, 2, 3}));
    EXPECT_EQ(index_window(IndexDomain::Integers, 2), (std::vector<long>{0, -1, 1, -2, 2}));
    MeasureSequence seq(IndexDomain::Naturals, [](long) { return DiscreteMeasure::dirac(0.0); }, "x");
    EXPECT_THROW(seq.at(0), DomainError);
    EXPECT_NO_THROW(seq.at(1));
}
