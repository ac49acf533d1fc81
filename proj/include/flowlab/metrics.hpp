#pragma once

#include <cstddef>
#include <vector>

#include "flowlab/measure.hpp"

namespace flowlab {

inline constexpr std::size_t kDefaultLpLimit = 200;

struct CouplingEntry {
    double src;
    double tgt;
    double mass;
};

struct CouplingPlan {
    std::vector<CouplingEntry> entries;
    double cost = 0.0;
};

// Atoms of both measures on a common sorted grid. Positions that agree within the merge
// tolerance share a slot.
struct AlignedMasses {
    std::vector<double> pos;
    std::vector<double> a;
    std::vector<double> b;
};

AlignedMasses align(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// 1 - sum sqrt(mu{x} nu{x}). Inputs must be probability measures; a defect counts as mass
// on its own atom disjoint from everything.
double hellinger_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// l1 convention, range [0, 2] for probability measures.
double total_variation(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct W2Result {
    double distance;
    CouplingPlan plan;
};

// Quantile (monotone) coupling, optimal for the quadratic cost on the line.
W2Result wasserstein2(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

enum class CutoffMode { Exact, MonotoneUpper };

// Cost min((x - y)^2, kappa^2). Exact mode solves the transportation problem and throws
// CapacityError above lp_limit atoms per side. MonotoneUpper returns the cost of the
// quantile coupling, an upper bound.
W2Result wasserstein2_cutoff(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double kappa,
                             CutoffMode mode = CutoffMode::Exact, std::size_t lp_limit = kDefaultLpLimit);

// sum_n p_n int (x - t_n)^2 dbeta_n, an upper bound on W2(sum p_n beta_n, sum p_n delta_{t_n})^2.
double mixture_w2_bound(const std::vector<double>& weights, const std::vector<DiscreteMeasure>& betas,
                        const std::vector<double>& targets);

}  // namespace flowlab
