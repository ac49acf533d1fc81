#include "flowlab/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "flowlab/errors.hpp"

namespace flowlab {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

double FolnerSpec::size(std::size_t level) const {
    if (kind == Kind::Interval) return static_cast<double>(sizes.at(level));
    return static_cast<double>(sets.at(level).size());
}

double FolnerSpec::sym_diff(std::size_t level, const std::vector<long>& g) const {
    if (kind == Kind::Interval) {
        if (g.size() != 1) throw DomainError("interval level sets live in Z");
        return 2.0 * static_cast<double>(std::min(std::labs(g[0]), sizes.at(level)));
    }
    if (g.size() != dim) throw DomainError("group element has the wrong dimension");
    const auto& A = sets.at(level);
    std::set<std::vector<long>> base(A.begin(), A.end());
    long moved_in = 0;
    for (const auto& x : A) {
        std::vector<long> y(x);
        for (std::size_t i = 0; i < dim; ++i) y[i] += g[i];
        if (base.count(y)) ++moved_in;
    }
    return 2.0 * static_cast<double>(static_cast<long>(A.size()) - moved_in);
}

void IntensitySpec::validate() const {
    if (lambda.size() != a.size()) throw DomainError("lambda and a must have the same length");
    if (folner.levels() != lambda.size()) throw DomainError("need one level set per level");
    for (std::size_t n = 0; n < lambda.size(); ++n) {
        if (!(lambda[n] > 0.0) || !std::isfinite(lambda[n])) throw DomainError("lambda_n must be positive");
        if (!std::isfinite(a[n])) throw DomainError("a_n must be finite");
        if (!(folner.size(n) > 0.0)) throw DomainError("level sets must be nonempty");
    }
    for (std::size_t n = 1; n < lambda.size(); ++n) {
        if (folner.kind == FolnerSpec::Kind::Interval && folner.sizes[n] <= folner.sizes[n - 1])
            throw DomainError("interval sizes must be strictly increasing");
        if (folner.kind == FolnerSpec::Kind::Sets && folner.sets[n].size() < folner.sets[n - 1].size())
            throw DomainError("level sets must not shrink");
    }
    if (folner.kind == FolnerSpec::Kind::Sets) {
        for (const auto& A : folner.sets) {
            std::set<std::vector<long>> uniq;
            for (const auto& x : A) {
                if (x.size() != folner.dim) throw DomainError("level set point has the wrong dimension");
                if (!uniq.insert(x).second) throw DomainError("level sets must not repeat points");
            }
        }
    }
}

double drift_weight(double a) { return (std::exp(a) - std::exp(-a)) * (std::exp(a) - 1.0); }

double kappa_level(const IntensitySpec& spec, std::size_t level, const std::vector<long>& g) {
    return 0.5 * spec.lambda[level] / spec.folner.size(level) * spec.folner.sym_diff(level, g) * drift_weight(spec.a[level]);
}

double kappa(const IntensitySpec& spec, const std::vector<long>& g, std::size_t level_horizon) {
    double s = 0.0;
    for (std::size_t n = 0; n < std::min(level_horizon, spec.levels()); ++n) s += kappa_level(spec, n, g);
    return s;
}

double kappa_sup_bound(const IntensitySpec& spec) {
    double s = 0.0;
    for (std::size_t n = 0; n < spec.levels(); ++n) s += spec.lambda[n] * drift_weight(spec.a[n]);
    return s;
}

const char* growth_verdict_name(GrowthVerdict v) {
    switch (v) {
        case GrowthVerdict::CertifiedPass: return "certified_pass";
        case GrowthVerdict::EmpiricalPass: return "empirical_pass";
        case GrowthVerdict::Fail: return "fail";
    }
    return "fail";
}

GrowthResult conservativity_growth(const IntensitySpec& spec, long radius, const std::vector<double>& s_grid) {
    spec.validate();
    if (radius < 1) throw DomainError("probe radius must be >= 1");
    if (s_grid.empty()) throw DomainError("empty s grid");
    for (double s : s_grid)
        if (!(s > 0.0)) throw DomainError("s grid values must be positive");
    const std::size_t d = spec.folner.kind == FolnerSpec::Kind::Interval ? 1 : spec.folner.dim;
    // kappa for each probe g and its inverse
    std::vector<double> worst;
    std::vector<long> g(d, -radius);
    for (;;) {
        std::vector<long> inv(g);
        for (auto& v : inv) v = -v;
        worst.push_back(std::max(kappa(spec, g), kappa(spec, inv)));
        std::size_t i = 0;
        while (i < d && g[i] == radius) g[i++] = -radius;
        if (i == d) break;
        ++g[i];
    }
    std::sort(worst.begin(), worst.end());
    GrowthResult r;
    r.sup_bound = kappa_sup_bound(spec);
    std::vector<double> grid(s_grid);
    std::sort(grid.begin(), grid.end());
    for (double s : grid) {
        long c = static_cast<long>(std::upper_bound(worst.begin(), worst.end(), s) - worst.begin());
        r.rows.push_back({s, c, c > 0 ? std::log(static_cast<double>(c)) / s : 0.0});
    }
    std::size_t top = r.rows.size() - std::max<std::size_t>(1, r.rows.size() / 4);
    for (std::size_t i = top; i < r.rows.size(); ++i) r.limsup_estimate = std::max(r.limsup_estimate, r.rows[i].ratio);
    if (r.sup_bound <= grid.back()) {
        r.verdict = GrowthVerdict::CertifiedPass;
        r.reasoning = "kappa <= " + fmt(r.sup_bound) +
                      " on the whole group, so every element counts once s reaches that bound and the ratio is infinite";
    } else if (r.limsup_estimate > 3.0) {
        r.verdict = GrowthVerdict::EmpiricalPass;
        r.reasoning = "log N(s)/s exceeds 3 on the upper part of the grid (probe set only)";
    } else {
        r.verdict = GrowthVerdict::Fail;
        r.reasoning = "log N(s)/s stays <= 3 on the upper part of the grid";
    }
    return r;
}

SelectionResult subsequence_select(const std::vector<double>& lambda, const std::vector<double>& a,
                                   std::vector<long> candidates, double kappa_const) {
    if (lambda.size() != a.size()) throw DomainError("lambda and a must have the same length");
    if (!(kappa_const > 0.0)) throw DomainError("kappa constant must be positive");
    for (long L : candidates)
        if (L < 1) throw DomainError("candidate sizes must be >= 1");
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return candidates[x] < candidates[y]; });
    SelectionResult res;
    res.spec.lambda = lambda;
    res.spec.a = a;
    res.spec.folner.kind = FolnerSpec::Kind::Interval;
    std::size_t pos = 0;
    long last = 0;
    for (std::size_t n = 0; n < lambda.size(); ++n) {
        const double cap = std::ldexp(1.0, -static_cast<int>(n + 1));
        if (a[n] == 0.0)
            res.warnings.push_back("level " + std::to_string(n + 1) +
                                   ": a = 0 leaves the level without drift; b_k = 0 excluded by PoissonFlowSpec invariant");
        bool found = false;
        for (; pos < order.size(); ++pos) {
            long L = candidates[order[pos]];
            if (L <= last) continue;
            double Ld = static_cast<double>(L);
            bool ok = a[n] == 0.0 || (lambda[n] * (1.0 + std::exp(a[n])) / Ld <= cap &&
                                      lambda[n] * drift_weight(a[n]) / Ld <= kappa_const * cap);
            if (ok) {
                res.chosen.push_back(order[pos]);
                res.spec.folner.sizes.push_back(L);
                last = L;
                ++pos;
                found = true;
                break;
            }
        }
        if (!found)
            throw SelectionError("no candidate size satisfies the level constraints at level " + std::to_string(n + 1));
    }
    return res;
}

double level_intensity(const IntensitySpec& spec, std::size_t level, long g) {
    if (spec.folner.kind != FolnerSpec::Kind::Interval) throw DomainError("emission needs interval level sets");
    long L = spec.folner.sizes[level];
    double base = spec.lambda[level] / static_cast<double>(L);
    return (g >= 0 && g < L) ? base : base * std::exp(spec.a[level]);
}

double poisson_hellinger_sq(double alpha, double beta) {
    double d = std::sqrt(alpha) - std::sqrt(beta);
    return -std::expm1(-0.5 * d * d);
}

double emitted_kakutani_closed_form(const IntensitySpec& spec, long g, long h) {
    double log_aff = 0.0;
    for (std::size_t n = 0; n < spec.levels(); ++n) {
        double d = std::sqrt(level_intensity(spec, n, g + h)) - std::sqrt(level_intensity(spec, n, h));
        log_aff -= 0.5 * d * d;
    }
    return -std::expm1(log_aff);
}

BernoulliFamily emit_bernoulli(const IntensitySpec& spec, const EmitOptions& opt) {
    spec.validate();
    if (spec.folner.kind != FolnerSpec::Kind::Interval) throw DomainError("emission needs interval level sets");
    const std::size_t levels = spec.levels();
    std::vector<long> K(levels);
    std::size_t count = 1;
    long Lmax = 0;
    for (std::size_t n = 0; n < levels; ++n) {
        double gmax = std::max(level_intensity(spec, n, 0), level_intensity(spec, n, -1));
        double cap = std::ldexp(1.0, -static_cast<int>(n + 1));
        if (std::exp(-level_intensity(spec, n, 0)) < 1.0 - cap || std::exp(-level_intensity(spec, n, -1)) < 1.0 - cap)
            throw DomainError("level " + std::to_string(n + 1) + " puts less than 1 - 2^-n mass on the zero count");
        long k = 0;
        while (poisson_tail(gmax, k) >= opt.eps_trunc) ++k;
        K[n] = k;
        count *= static_cast<std::size_t>(k + 1);
        if (count > opt.atom_cap) throw CapacityError("truncated product space exceeds the atom cap");
        Lmax = std::max(Lmax, spec.folner.sizes[n]);
    }
    std::vector<std::string> labels(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t r = idx;
        std::string s;
        for (std::size_t n = 0; n < levels; ++n) {
            std::size_t c = r % static_cast<std::size_t>(K[n] + 1);
            r /= static_cast<std::size_t>(K[n] + 1);
            if (n) s += ",";
            s += std::to_string(c);
        }
        labels[idx] = s;
    }
    const double budget = opt.defect_budget;
    auto gen = [spec, K, count, budget](long g) {
        const std::size_t levels = K.size();
        std::vector<std::vector<double>> pmf(levels);
        double kept = 1.0;
        for (std::size_t n = 0; n < levels; ++n) {
            double gam = level_intensity(spec, n, g);
            double s = 0.0;
            for (long c = 0; c <= K[n]; ++c) {
                pmf[n].push_back(poisson_pmf(gam, c));
                s += pmf[n].back();
            }
            kept *= s;
        }
        double defect = std::max(0.0, 1.0 - kept);
        if (defect > budget) throw CapacityError("emitted marginal exceeds the defect budget");
        std::vector<Atom> atoms(count);
        for (std::size_t idx = 0; idx < count; ++idx) {
            std::size_t r = idx;
            double m = 1.0;
            for (std::size_t n = 0; n < levels; ++n) {
                std::size_t c = r % static_cast<std::size_t>(K[n] + 1);
                r /= static_cast<std::size_t>(K[n] + 1);
                m *= pmf[n][c];
            }
            atoms[idx] = {static_cast<double>(idx), m};
        }
        return DiscreteMeasure(std::move(atoms), defect);
    };
    // Every g < 0 or g >= max L lies outside all level sets.
    return BernoulliFamily(std::move(labels), gen, "poisson_product", Lmax - 1);
}

PoissonFlowSpec associated_flow_spec(const IntensitySpec& spec) {
    spec.validate();
    PoissonFlowSpec out;
    out.positive_type = true;
    for (std::size_t n = 0; n < spec.levels(); ++n) {
        if (spec.a[n] == 0.0) throw DomainError("level " + std::to_string(n + 1) + " has a = 0, excluded from the flow spec");
        out.entries.push_back({spec.lambda[n], spec.a[n]});
        if (spec.a[n] < 0.0) out.positive_type = false;
    }
    return out;
}

}  // namespace flowlab
