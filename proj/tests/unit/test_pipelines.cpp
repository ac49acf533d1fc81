#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flowlab/errors.hpp"
#include "flowlab/pipelines.hpp"
#include "oracles.hpp"

using namespace flowlab;

namespace {

double lambda_prime_ref(double b) { return std::exp(-b) / (1.0 + std::exp(-b)); }

}  // namespace

TEST(Specs, Validation) {
    EXPECT_THROW((PoissonFlowSpec{{{0.0, 1.0}}}).validate(), DomainError);
    EXPECT_THROW((PoissonFlowSpec{{{1.0, 0.0}}}).validate(), DomainError);
    EXPECT_THROW((PoissonFlowSpec{{{1.0, -1.0}}}).validate(), DomainError);
    EXPECT_NO_THROW((PoissonFlowSpec{{{1.0, -1.0}}, false}).validate());
    EXPECT_THROW((ITPFI2Spec{{{1.0, 0}}}).validate(), DomainError);
    EXPECT_THROW((ITPFI2Spec{{{-1.0, 2}}}).validate(), DomainError);
}

TEST(Itpfi2ToPoisson, IntensityAndProkhorovBound) {
    ITPFI2Spec spec{{{1.5, 3}, {2.5, 5}, {4.0, 2}}};
    auto r = itpfi2_to_poisson(spec);
    ASSERT_EQ(r.spec.entries.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& e = spec.entries[i];
        EXPECT_NEAR(r.spec.entries[i].lambda, e.M * lambda_prime_ref(e.b), 1e-15);
        EXPECT_EQ(r.spec.entries[i].b, e.b);
        // Oracle: binomial law against Poisson pmf on the lattice b Z.
        double q = lambda_prime_ref(e.b), lam = r.spec.entries[i].lambda, tv = 0.0, covered = 0.0;
        for (long k = 0; k <= 60; ++k) {
            double binom = k <= e.M ? std::tgamma(e.M + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(e.M - k + 1.0)) *
                                          std::pow(q, k) * std::pow(1 - q, e.M - k)
                                    : 0.0;
            double pois = oracle::poisson_pmf(lam, k);
            covered += pois;
            tv += std::abs(binom - pois);
        }
        tv += 1.0 - covered;
        EXPECT_NEAR(r.checks[i].exact, tv, 1e-10);
        EXPECT_LE(r.checks[i].exact, 4.0 * std::exp(-e.b));
    }
    EXPECT_EQ(r.prokhorov.verdict, Verdict::CertifiedConvergent);
}

TEST(PoissonToItpfi2, SlicesRecoverMultiplicities) {
    std::vector<DiscreteMeasure> intens{DiscreteMeasure::dirac(1.5, 3 * lambda_prime_ref(1.5)),
                                        DiscreteMeasure::dirac(2.5, 5 * lambda_prime_ref(2.5)),
                                        DiscreteMeasure::dirac(0.5, 0.3)};
    auto r = poisson_to_itpfi2(intens);
    ASSERT_EQ(r.spec.entries.size(), 2u);
    EXPECT_EQ(r.spec.entries[0].M, 3);
    EXPECT_EQ(r.spec.entries[1].M, 5);
    EXPECT_NEAR(r.discarded.total_mass(), 0.3, 1e-15);
    for (const auto& s : r.slices) {
        EXPECT_LE(s.intensity_gap, s.lambda_prime);
        EXPECT_LE(s.lipschitz.exact, s.lipschitz.bound + 1e-12);
        EXPECT_LE(s.prokhorov.exact, s.prokhorov.bound);
        ASSERT_TRUE(s.w2_sq_exact);
        EXPECT_LE(*s.w2_sq_exact, s.concentration + 1e-9);
    }
    EXPECT_THROW(poisson_to_itpfi2({DiscreteMeasure::dirac(-1.0, 1.0)}), DomainError);
}

TEST(PoissonToItpfi2, SpreadSliceConcentration) {
    // Two atoms in one slice: zeta-mean b, concentration is the zeta second moment about b.
    DiscreteMeasure eta({{2.2, 0.4}, {2.8, 0.6}});
    auto r = poisson_to_itpfi2({eta});
    ASSERT_EQ(r.slices.size(), 1u);
    const auto& s = r.slices[0];
    EXPECT_NEAR(s.b, 2.56, 1e-14);
    EXPECT_NEAR(s.concentration, 0.4 * 0.36 * 0.36 + 0.6 * 0.24 * 0.24, 1e-14);
    // Oracle W2 between the two compound Poisson laws.
    DiscreteMeasure e1 = compound_poisson(eta, 1e-14), e2 = standard_poisson(1.0, 2.56, 1e-14);
    EXPECT_NEAR(*s.w2_sq_exact, oracle::w2_sq(DiscreteMeasure(e1.atoms()), DiscreteMeasure(e2.atoms())), 1e-9);
}

TEST(TwoPoint, BucketsAndLeCam) {
    std::vector<DiscreteMeasure> fam{DiscreteMeasure({{0.0, 0.9}, {2.5, 0.1}}),
                                     DiscreteMeasure({{0.0, 0.8}, {2.2, 0.2}}),
                                     DiscreteMeasure({{1.0, 0.05}, {5.0, 0.95}}),
                                     DiscreteMeasure({{0.0, 0.7}, {0.5, 0.3}})};
    auto r = two_point_to_poisson(fam, 2.0);
    EXPECT_EQ(r.discarded, (std::vector<std::size_t>{3}));
    ASSERT_EQ(r.buckets.size(), 2u);
    // Member 2: heavy atom at 5, light at 1, d = -4, bucket -4.
    EXPECT_EQ(r.buckets[0].k, -4);
    EXPECT_EQ(r.buckets[1].k, 2);
    const auto& B = r.buckets[1];
    EXPECT_NEAR(B.lambda, 0.3, 1e-15);
    EXPECT_NEAR(B.b, 2.35, 1e-15);
    EXPECT_NEAR(B.w2_term, 0.1 * 0.15 * 0.15 + 0.2 * 0.15 * 0.15, 1e-15);
    EXPECT_NEAR(B.lecam_sup, (0.01 + 0.04) / 0.3, 1e-15);
    // Oracle: Bernoulli convolution vs Poisson, in lattice units of b.
    auto bern = oracle::convolve(oracle::grid(DiscreteMeasure({{0.0, 0.9}, {1.0, 0.1}})),
                                 oracle::grid(DiscreteMeasure({{0.0, 0.8}, {1.0, 0.2}})));
    oracle::Grid pois;
    for (int k = 0; k < 40; ++k) pois[oracle::key(k)] += oracle::poisson_pmf(0.3, k);
    EXPECT_NEAR(*B.tv_exact, oracle::l1(bern, pois), 1e-12);
    EXPECT_LE(*B.tv_exact, B.lecam_l1);
    EXPECT_FALSE(r.spec.positive_type);
    // Member variances are 0.5625, 0.7744 and 0.76.
    EXPECT_THROW(two_point_to_poisson(fam, 0.7), DomainError);
}

TEST(TwoPoint, PoissonToTwoPointCaps) {
    PoissonFlowSpec spec{{{0.6, 2.0}, {0.5, 3.5}, {0.25, 5.0}}};
    auto r = poisson_to_two_point(spec, 0.5);
    ASSERT_EQ(r.family.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        double p = r.family[i].eta.mass_at(spec.entries[i].b);
        EXPECT_LE(p, std::pow(0.5, i + 1) + 1e-15);
        EXPECT_NEAR(p * r.family[i].copies, spec.entries[i].lambda, 1e-12);
        EXPECT_LE(r.checks[i].exact, r.checks[i].bound);
    }
    EXPECT_THROW(poisson_to_two_point(spec, 1.5), DomainError);
}

TEST(AlmostPeriodic, RotationTargetsContract) {
    for (double theta : {1.0 / 3.0, std::numbers::sqrt2 - 1.0}) {
        auto target = stock_rotation_target(theta, 5);
        ASSERT_EQ(target.thetas.size(), 5u);
        EXPECT_EQ(target.thetas[0], 0.0);
        AlmostPeriodicOptions opt;
        opt.depth = 6;
        opt.seed_horizon = 256;
        auto r = almost_periodic_pipeline(target, opt);
        EXPECT_TRUE(r.certified_contraction);
        ASSERT_EQ(r.blocks.size(), 6u);
        for (std::size_t i = 0; i + 1 < r.blocks.size(); ++i)
            EXPECT_EQ(r.blocks[i].n_end + 1, r.blocks[i + 1].n_begin);
        for (const auto& e : r.spec.entries) EXPECT_GT(e.b, 0.0);
        for (const auto& s : r.eigenvalues) {
            EXPECT_EQ(s.verdict, Verdict::CertifiedConvergent);
            EXPECT_LE(*s.tail_bound, 2.0 / opt.depth + 1e-12);
        }
    }
}

TEST(AlmostPeriodic, HalfRotationHasNoContraction) {
    AlmostPeriodicTarget t;
    t.thetas = {0.0, 0.5};
    t.seeds = MeasureSequence(IndexDomain::Naturals, [](long) { return DiscreteMeasure({{0.0, 0.5}, {1.0, 0.5}}); },
                              "fair");
    AlmostPeriodicOptions opt;
    opt.depth = 3;
    opt.seed_horizon = 64;
    EXPECT_THROW(almost_periodic_pipeline(t, opt), NoContraction);
    t.thetas = {0.25};
    EXPECT_THROW(almost_periodic_pipeline(t, opt), DomainError);
}

TEST(Split, DivisibilityIsExactUpToTruncation) {
    PoissonFlowSpec spec{{{0.6, 2.0}, {1.2, 0.5}}};
    auto r = split_divisible(spec, 3);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(r.spec.entries[i].lambda * 3, spec.entries[i].lambda, 1e-15);
        EXPECT_LE(r.tv_check[i], r.defect_budget[i] + 1e-12);
    }
}

TEST(Binomial, CheckAgainstOracleAndBound) {
    DiscreteMeasure P = DiscreteMeasure::dirac(1.0), Q = DiscreteMeasure::dirac(2.0);
    auto r = binomial_approx_check(0.6, 0.3, P, Q, 3);
    EXPECT_EQ(r.K, 3);
    EXPECT_EQ(r.M, 2);
    EXPECT_NEAR(r.tv_exact, 0.10286, 1e-5);
    EXPECT_NEAR(r.bound, 4.0 * std::sqrt(0.3), 1e-15);
    // Oracle via grid convolution.
    const double s = 1.9;
    oracle::Grid rho{{0, 1 / s}, {oracle::key(1.0), 0.6 / s}, {oracle::key(2.0), 0.3 / s}};
    oracle::Grid hat{{0, 1 / 1.6}, {oracle::key(1.0), 0.6 / 1.6}};
    oracle::Grid gam{{0, 1 / 1.3}, {oracle::key(2.0), 0.3 / 1.3}};
    oracle::Grid lhs{{0, 1.0}}, rhs{{0, 1.0}};
    for (int i = 0; i < 3; ++i) lhs = oracle::convolve(lhs, rho);
    for (int i = 0; i < 3; ++i) rhs = oracle::convolve(rhs, hat);
    for (int i = 0; i < 2; ++i) rhs = oracle::convolve(rhs, gam);
    EXPECT_NEAR(r.tv_exact, oracle::l1(lhs, rhs), 1e-13);
}

TEST(Reduce, BucketsMoveToMiddlePoints) {
    auto r = itpfi_bounded_reduce({{0.5, 1.5}, {0.7, 1.2}, {2.5, 2.5}});
    // First bucket [0, 1) goes to 0; [1, 2) to the median of {1.5, 1.2}; [2, 3) to 2.5.
    EXPECT_EQ(r.b_per_state[0][0], 0.0);
    EXPECT_NEAR(r.b_per_state[0][1], 1.35, 1e-15);
    EXPECT_NEAR(r.b_per_state[1][1], 1.35, 1e-15);
    EXPECT_EQ(r.b_per_state[2][0], 2.5);
    for (const auto& g : r.groups)
        if (g.split) EXPECT_LE(g.split->tv_exact, g.split->bound);
    EXPECT_EQ(r.wasserstein.verdict, Verdict::CertifiedConvergent);
    auto c = itpfi_bounded_reduce({{0.5, 1.5}, {0.7, 1.2}}, {true});
    EXPECT_NEAR(c.b_per_state[0][0], 0.6, 1e-15);
    EXPECT_THROW(itpfi_bounded_reduce({{0.5}, {0.5, 1.0}}), DomainError);
}
