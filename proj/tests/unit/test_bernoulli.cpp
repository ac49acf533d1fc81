#include <gtest/gtest.h>

#include <cmath>

#include "flowlab/bernoulli.hpp"
#include "flowlab/errors.hpp"
#include "oracles.hpp"

using namespace flowlab;

namespace {

DiscreteMeasure bern(double p) { return DiscreteMeasure({{0.0, 1.0 - p}, {1.0, p}}); }

BernoulliFamily step_family() {
    return BernoulliFamily({"0", "1"}, [](long n) { return bern(n < 0 ? 0.25 : 0.75); }, "step", 0);
}

// H^2(Bern(1/4), Bern(3/4)) = 1 - 2 sqrt(3/16)
const double kStepH2 = 1.0 - std::sqrt(3.0) / 2.0;

BernoulliFamily uniform_prefix(std::size_t M) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < M; ++i) labels.push_back(std::to_string(i));
    return BernoulliFamily(labels, [M](long n) {
        long top = std::min<long>(std::labs(n), static_cast<long>(M) - 1);
        std::vector<Atom> a;
        for (long i = 0; i <= top; ++i) a.push_back({static_cast<double>(i), 1.0 / (top + 1)});
        return DiscreteMeasure(a);
    }, "uniform_prefix");
}

}  // namespace

TEST(Family, ConstantBeyondClampsIndices) {
    auto fam = step_family();
    EXPECT_EQ(fam.at(-50), fam.at(-1));
    EXPECT_EQ(fam.at(50), fam.at(1));
    BernoulliFamily bad({"0"}, [](long) { return DiscreteMeasure::dirac(3.0); }, "bad");
    EXPECT_THROW(bad.at(0), DomainError);
    BernoulliFamily sub({"0"}, [](long) { return DiscreteMeasure::dirac(0.0, 0.5); }, "sub");
    EXPECT_THROW(sub.at(0), DomainError);
    EXPECT_EQ(fam.label_index("1"), 1u);
    EXPECT_THROW(fam.label_index("2"), DomainError);
}

TEST(Kakutani, StepFamilySingleTerm) {
    BernoulliOptions opt;
    opt.horizon = 50;
    auto s = kakutani_check(step_family(), 1, opt);
    for (std::size_t i = 0; i < s.indices.size(); ++i)
        EXPECT_NEAR(s.terms[i], s.indices[i] == -1 ? kStepH2 : 0.0, 1e-15) << s.indices[i];
    EXPECT_EQ(s.verdict, Verdict::CertifiedConvergent);
    EXPECT_NEAR(s.total_upper(), 0.1339745962155614, 1e-12);
}

TEST(Cocycle, StepFamilyNormAndReindexing) {
    BernoulliOptions opt;
    opt.horizon = 40;
    auto fam = step_family();
    for (long k : {1L, 3L, 7L}) {
        auto s = cocycle_norm(fam, k, opt);
        EXPECT_NEAR(s.total_upper(), 2.0 * k * kStepH2, 1e-12);
        EXPECT_NEAR(cocycle_norm(fam, -k, opt).total_upper(), s.total_upper(), 1e-12);
        EXPECT_NEAR(cocycle_norm_reindexed(fam, k, 40), s.partial_total(), 1e-12);
    }
    EXPECT_NEAR(cocycle_norm(fam, 3, opt).total_upper(), 0.8038475772933684, 1e-12);
}

TEST(Dissipativity, StepFamilyTotal) {
    auto fam = step_family();
    auto w = limit_witness(fam);
    ASSERT_TRUE(w);
    EXPECT_NEAR(w->slope, 2.0 * kStepH2, 1e-15);
    EXPECT_EQ(w->k0, 1);
    auto r = dissipativity_certificate(fam, 200, 200);
    EXPECT_FALSE(r.heuristic);
    EXPECT_EQ(r.series.verdict, Verdict::CertifiedConvergent);
    // Oracle: ||c_k||^2 = 2 |k| H^2 on a wide window, so the sum is 1 + 2 sum_k e^{-k H^2}.
    double want = 1.0;
    for (long k = 1; k <= 200; ++k) want += 2.0 * std::exp(-k * kStepH2);
    EXPECT_NEAR(r.series.partial_total(), want, 1e-9);
    EXPECT_NEAR(r.series.total_upper(), 14.950525652644298, 1e-6);
    EXPECT_LT(*r.series.tail_bound, 1e-9);
    for (std::size_t i = 0; i < r.norm_sq.size(); ++i)
        EXPECT_GE(r.norm_sq[i] + 1e-12, w->slope * (std::labs(r.series.indices[i]) - w->k0));
}

TEST(Bridge, StepFamilyFloor) {
    auto r = hellinger_bridge(step_family(), 5, 20);
    EXPECT_FALSE(r.found);
    EXPECT_NEAR(r.floor, std::sqrt(kStepH2), 1e-10);
    auto flat = hellinger_bridge(BernoulliFamily({"0", "1"}, [](long) { return bern(0.5); }, "flat"), 3, 10);
    EXPECT_TRUE(flat.found);
    EXPECT_THROW(hellinger_bridge(step_family(), 5, 3), DomainError);
}

TEST(AtomicFixedPoint, GeometricApproach) {
    BernoulliFamily fam({"0", "1"}, [](long n) {
        double q = std::pow(2.0, -std::labs(n) - 2);
        return DiscreteMeasure({{0.0, 1.0 - q}, {1.0, q}});
    }, "atomic");
    BernoulliOptions opt;
    opt.horizon = 60;
    auto series = atom_fixed_point_check(fam, opt, {{0, TermEnvelope::geometric(0.25, 0.5, 0)}});
    ASSERT_EQ(series.size(), 2u);
    EXPECT_EQ(series[0].series.verdict, Verdict::CertifiedConvergent);
    EXPECT_NEAR(series[0].series.total_upper(), 0.75, 1e-9);
    auto rep = structure_report(fam, opt, {{{0, TermEnvelope::geometric(0.25, 0.5, 0)}}});
    EXPECT_EQ(rep.kind, StructureCase::AtomicFixedPoint);
    EXPECT_TRUE(rep.certified);
    EXPECT_EQ(*rep.atom, 0u);
}

TEST(Structure, StepFamilyIsDissipative) {
    BernoulliOptions opt;
    opt.horizon = 60;
    auto rep = structure_report(step_family(), opt);
    EXPECT_EQ(rep.kind, StructureCase::Dissipative);
    EXPECT_TRUE(rep.certified);
    EXPECT_STREQ(structure_case_name(rep.kind), "dissipative");
}

TEST(ConservativeCore, MassOutside) {
    BernoulliFamily fam({"0", "1", "2"}, [](long n) {
        double q = std::pow(0.5, std::labs(n) + 1);
        return DiscreteMeasure({{0.0, 0.5 - q / 2}, {1.0, 0.5 - q / 2}, {2.0, q}});
    }, "core");
    BernoulliOptions opt;
    opt.horizon = 30;
    opt.envelope = TermEnvelope::geometric(0.5, 0.5, 0);
    auto s = conservative_core_check(fam, {0, 1}, opt);
    EXPECT_EQ(s.verdict, Verdict::CertifiedConvergent);
    // 1/2 + 2 sum_{n>=1} 2^{-n-1} = 3/2
    EXPECT_NEAR(s.total_upper(), 1.5, 1e-9);
    EXPECT_THROW(conservative_core_check(fam, {}, opt), DomainError);
}

TEST(TypeII1, EpsInverseN) {
    BernoulliFamily fam({"0", "1"}, [](long n) { return bern(n >= 1 ? 0.5 + std::min(1.0 / n, 0.25) : 0.5); },
                        "eps");
    BernoulliOptions opt;
    opt.horizon = 200;
    opt.envelope = TermEnvelope::power(2.0, 2.0, 1);
    auto s = type_II1_check(fam, bern(0.5), opt);
    EXPECT_EQ(s.verdict, Verdict::CertifiedConvergent);
    for (std::size_t i = 0; i < s.indices.size(); ++i) {
        long n = s.indices[i];
        double p = n >= 1 ? 0.5 + std::min(1.0 / n, 0.25) : 0.5;
        double want = 1.0 - std::sqrt(0.5 * p) - std::sqrt(0.5 * (1.0 - p));
        EXPECT_NEAR(s.terms[i], want, 1e-14);
    }
    EXPECT_THROW(type_II1_check(fam, DiscreteMeasure::dirac(0.0), opt), DomainError);
}

TEST(TypeIIinf, CountingMeasure) {
    const std::size_t M = 41;
    auto fam = uniform_prefix(M);
    SigmaFiniteMeasure nu{std::vector<double>(M, 1.0), true, 1.0};
    ExhaustionSets U = [M](long n) {
        std::vector<std::size_t> s;
        for (long i = 0; i <= std::min<long>(std::labs(n), static_cast<long>(M) - 1); ++i) s.push_back(i);
        return s;
    };
    BernoulliOptions opt;
    opt.horizon = 40;
    auto r = type_IIinf_check(fam, nu, U, opt, TermEnvelope::zero(0), TermEnvelope::zero(0));
    EXPECT_TRUE(r.type_IIinf);
    for (double t : r.outside_mass.terms) EXPECT_EQ(t, 0.0);
    for (double t : r.hellinger.terms) EXPECT_NEAR(t, 0.0, 1e-15);
    EXPECT_EQ(r.nu_outside.verdict, Verdict::CertifiedDivergent);
    SigmaFiniteMeasure finite{std::vector<double>(M, 1.0), false, 0.0};
    EXPECT_FALSE(type_IIinf_check(fam, finite, U, opt, TermEnvelope::zero(0), TermEnvelope::zero(0)).type_IIinf);
}
