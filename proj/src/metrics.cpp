#include "flowlab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "flowlab/errors.hpp"
#include "flowlab/kernels.hpp"
#include "flowlab/transport.hpp"

namespace flowlab {

namespace {

constexpr double kW2DefectTol = 1e-9;

void require_probability(const DiscreteMeasure& mu, const char* what) {
    if (!mu.is_probability()) throw DomainError(std::string(what) + " needs probability measures");
}

template <class Cost>
CouplingPlan monotone_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Cost cost) {
    CouplingPlan plan;
    const auto& A = mu.atoms();
    const auto& B = nu.atoms();
    std::size_t i = 0, j = 0;
    double ra = A.empty() ? 0.0 : A[0].mass, rb = B.empty() ? 0.0 : B[0].mass;
    while (i < A.size() && j < B.size()) {
        double f = std::min(ra, rb);
        if (f > 0.0) {
            plan.entries.push_back({A[i].pos, B[j].pos, f});
            plan.cost += f * cost(A[i].pos, B[j].pos);
        }
        ra -= f;
        rb -= f;
        // Advance whichever side is exhausted; on a tie both move.
        bool adv_a = ra <= rb, adv_b = rb <= ra;
        if (adv_a && ++i < A.size()) ra = A[i].mass;
        if (adv_b && ++j < B.size()) rb = B[j].mass;
    }
    return plan;
}

double matched_mass(const CouplingPlan& p) {
    double s = 0.0;
    for (const auto& e : p.entries) s += e.mass;
    return s;
}

}  // namespace

AlignedMasses align(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    AlignedMasses out;
    const auto& A = mu.atoms();
    const auto& B = nu.atoms();
    std::size_t i = 0, j = 0;
    while (i < A.size() || j < B.size()) {
        if (i < A.size() && j < B.size() && same_position(A[i].pos, B[j].pos)) {
            out.pos.push_back(A[i].pos);
            out.a.push_back(A[i].mass);
            out.b.push_back(B[j].mass);
            ++i, ++j;
        } else if (j >= B.size() || (i < A.size() && A[i].pos < B[j].pos)) {
            out.pos.push_back(A[i].pos);
            out.a.push_back(A[i].mass);
            out.b.push_back(0.0);
            ++i;
        } else {
            out.pos.push_back(B[j].pos);
            out.a.push_back(0.0);
            out.b.push_back(B[j].mass);
            ++j;
        }
    }
    return out;
}

double hellinger_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    require_probability(mu, "hellinger_sq");
    require_probability(nu, "hellinger_sq");
    auto al = align(mu, nu);
    double aff = kernels::active().sum_sqrt_product(al.a.data(), al.b.data(), al.a.size());
    return std::clamp(1.0 - aff, 0.0, 1.0);
}

double total_variation(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    auto al = align(mu, nu);
    return kernels::active().sum_abs_diff(al.a.data(), al.b.data(), al.a.size()) +
           std::abs(mu.defect() - nu.defect());
}

W2Result wasserstein2(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    require_probability(mu, "wasserstein2");
    require_probability(nu, "wasserstein2");
    if (mu.defect() > kW2DefectTol || nu.defect() > kW2DefectTol)
        throw DomainError("wasserstein2 is undefined for truncated measures; use the cutoff variant");
    auto plan = monotone_coupling(mu, nu, [](double x, double y) { return (x - y) * (x - y); });
    return {std::sqrt(std::max(plan.cost, 0.0)), std::move(plan)};
}

W2Result wasserstein2_cutoff(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double kappa, CutoffMode mode,
                             std::size_t lp_limit) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("cutoff kappa must be positive");
    require_probability(mu, "wasserstein2_cutoff");
    require_probability(nu, "wasserstein2_cutoff");
    const double cap = kappa * kappa;

    if (mode == CutoffMode::MonotoneUpper) {
        auto plan = monotone_coupling(mu, nu, [cap](double x, double y) { return std::min((x - y) * (x - y), cap); });
        // Whatever the atom coupling leaves over is matched against a defect at cost kappa^2.
        double unmatched = std::max(0.0, 1.0 - matched_mass(plan));
        plan.cost += cap * unmatched;
        return {std::sqrt(std::max(plan.cost, 0.0)), std::move(plan)};
    }

    if (mu.size() > lp_limit || nu.size() > lp_limit)
        throw CapacityError("exact cutoff transport exceeds the LP atom limit; use monotone_upper");

    // Defects enter as one extra symbolic atom per side whose every cost is kappa^2.
    const bool dm = mu.defect() > 0.0, dn = nu.defect() > 0.0;
    std::vector<double> supply = mu.masses(), demand = nu.masses();
    if (dm) supply.push_back(mu.defect());
    if (dn) demand.push_back(nu.defect());
    const std::size_t n = supply.size(), m = demand.size();
    auto x = mu.positions(), y = nu.positions();
    std::vector<double> cost(n * m, cap);
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < x.size(); ++i) k.cutoff_cost_row(x[i], y.data(), y.size(), cap, cost.data() + i * m);

    auto sol = solve_transport(supply, demand, cost);
    CouplingPlan plan;
    plan.cost = sol.cost;
    for (const auto& f : sol.flows) {
        if (f.src >= x.size() || f.tgt >= y.size()) continue;  // symbolic defect legs carry no location
        plan.entries.push_back({x[f.src], y[f.tgt], f.mass});
    }
    return {std::sqrt(std::max(plan.cost, 0.0)), std::move(plan)};
}

double mixture_w2_bound(const std::vector<double>& weights, const std::vector<DiscreteMeasure>& betas,
                        const std::vector<double>& targets) {
    if (weights.size() != betas.size() || weights.size() != targets.size())
        throw DomainError("mixture bound: weights, measures and targets differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0)) throw DomainError("mixture weights must be nonnegative");
        require_probability(betas[i], "mixture_w2_bound");
        total += weights[i] * second_moment_about(betas[i], targets[i]);
    }
    return total;
}

}  // namespace flowlab
