#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowlab/bernoulli.hpp"
#include "flowlab/pipelines.hpp"

namespace flowlab {

// Level sets A_n. Interval kind: A_n = {0, ..., L_n - 1} in Z. Sets kind: explicit finite
// subsets of Z^d.
struct FolnerSpec {
    enum class Kind { Interval, Sets };
    Kind kind = Kind::Interval;
    std::vector<long> sizes;
    std::vector<std::vector<std::vector<long>>> sets;
    std::size_t dim = 1;

    std::size_t levels() const { return kind == Kind::Interval ? sizes.size() : sets.size(); }
    double size(std::size_t level) const;
    // |gA_n \triangle A_n|
    double sym_diff(std::size_t level, const std::vector<long>& g) const;
};

// Per-level data lambda_n > 0 and drift a_n, with the level sets.
struct IntensitySpec {
    std::vector<double> lambda;
    std::vector<double> a;
    FolnerSpec folner;

    void validate() const;
    std::size_t levels() const { return lambda.size(); }
};

// (e^a - e^-a)(e^a - 1), nonnegative for every real a.
double drift_weight(double a);

// kappa_n(g) = 1/2 lambda_n |A_n|^-1 |gA_n \triangle A_n| drift_weight(a_n)
double kappa_level(const IntensitySpec& spec, std::size_t level, const std::vector<long>& g);
// Sums levels n < level_horizon.
double kappa(const IntensitySpec& spec, const std::vector<long>& g, std::size_t level_horizon = SIZE_MAX);
// sup over the group of kappa: every |gA \triangle A| <= 2|A|.
double kappa_sup_bound(const IntensitySpec& spec);

enum class GrowthVerdict { CertifiedPass, EmpiricalPass, Fail };
const char* growth_verdict_name(GrowthVerdict v);

struct GrowthRow {
    double s;
    long count;  // #{g in probe set : kappa(g), kappa(g^-1) <= s}
    double ratio;
};

struct GrowthResult {
    std::vector<GrowthRow> rows;
    double sup_bound = 0.0;
    double limsup_estimate = 0.0;
    GrowthVerdict verdict = GrowthVerdict::Fail;
    std::string reasoning;
};

// Probe set: the cube [-radius, radius]^d. Certified when the analytic bound on sup kappa is
// reached inside the s grid (the count is then the whole, infinite, group).
GrowthResult conservativity_growth(const IntensitySpec& spec, long radius, const std::vector<double>& s_grid);

struct SelectionResult {
    IntensitySpec spec;
    std::vector<std::size_t> chosen;  // indices into the candidate sizes
    std::vector<std::string> warnings;
};

// Chooses increasing interval sizes, one per level, with lambda_n (1 + e^a_n) / L_n <= 2^-n and
// lambda_n drift_weight(a_n) / L_n <= kappa_const 2^-n. Throws SelectionError when none fit.
SelectionResult subsequence_select(const std::vector<double>& lambda, const std::vector<double>& a,
                                   std::vector<long> candidates, double kappa_const = 1.0);

// gamma_0(g, n): lambda_n / |A_n| on A_n, lambda_n e^a_n / |A_n| off it.
double level_intensity(const IntensitySpec& spec, std::size_t level, long g);

// H^2 between Poisson laws with means alpha and beta.
double poisson_hellinger_sq(double alpha, double beta);

// Closed form of H^2(mu_{g+h}, mu_h) for the emitted product family.
double emitted_kakutani_closed_form(const IntensitySpec& spec, long g, long h);

struct EmitOptions {
    double eps_trunc = kDefaultTruncation;
    double defect_budget = 1e-9;
    std::size_t atom_cap = 200000;
};

// Z-indexed family mu_g = prod_n Poisson(gamma_0(g, n)) on truncated count vectors. Interval
// level sets only.
BernoulliFamily emit_bernoulli(const IntensitySpec& spec, const EmitOptions& opt = {});

// (lambda_n, a_n) as a Poisson flow spec. a_n = 0 throws DomainError.
PoissonFlowSpec associated_flow_spec(const IntensitySpec& spec);

}  // namespace flowlab
