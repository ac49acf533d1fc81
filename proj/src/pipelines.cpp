#include "flowlab/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "flowlab/errors.hpp"
#include "flowlab/metrics.hpp"
#include "flowlab/tail_boundary.hpp"

namespace flowlab {

namespace {

constexpr long kExactPowerLimit = 20000;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

void check_bound(const std::string& what, double exact, double bound, double slack = 1e-12) {
    if (exact > bound * (1.0 + 1e-9) + slack)
        throw BoundViolation(what + ": exact " + fmt(exact) + " exceeds bound " + fmt(bound));
}

SeriesOptions finite_options(std::size_t count, const PipelineOptions& opt) {
    SeriesOptions so;
    so.horizon = static_cast<long>(count);
    so.threshold_diverge = opt.threshold_diverge;
    // A finite input has no terms past its last entry unless the caller describes a longer spec.
    so.envelope = opt.tail ? *opt.tail : TermEnvelope::zero(static_cast<long>(count) + 1);
    return so;
}

std::vector<long> one_based(std::size_t n) {
    std::vector<long> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<long>(i + 1);
    return idx;
}

// Series indexed 1..terms.size().
CertificateSeries numbered_series(std::string name, std::vector<double> terms, const SeriesOptions& opt) {
    auto idx = one_based(terms.size());
    return make_series(std::move(name), std::move(idx), std::move(terms), opt);
}

double lambda_prime(double b) {
    double w = std::exp(-b);
    return w / (1.0 + w);
}

// Extra TV slack introduced by truncation defects on either side.
double defect_slack(const DiscreteMeasure& x, const DiscreteMeasure& y) {
    return 2.0 * (x.defect() + y.defect()) + 1e-12;
}

}  // namespace

void PoissonFlowSpec::validate() const {
    for (const auto& e : entries) {
        if (!(e.lambda > 0.0) || !std::isfinite(e.lambda)) throw DomainError("Poisson flow spec needs lambda > 0");
        if (e.b == 0.0 || !std::isfinite(e.b)) throw DomainError("Poisson flow spec needs b != 0");
        if (positive_type && e.b < 0.0) throw DomainError("positive-type Poisson flow spec needs b > 0");
    }
}

void ITPFI2Spec::validate() const {
    for (const auto& e : entries) {
        if (!(e.b > 0.0) || !std::isfinite(e.b)) throw DomainError("ITPFI2 spec needs b > 0");
        if (e.M < 1) throw DomainError("ITPFI2 spec needs M >= 1");
    }
}

ItpfiToPoissonResult itpfi2_to_poisson(const ITPFI2Spec& spec, const PipelineOptions& opt) {
    spec.validate();
    ItpfiToPoissonResult res;
    std::vector<double> terms;
    for (const auto& e : spec.entries) {
        double lam = static_cast<double>(e.M) * lambda_prime(e.b);
        res.spec.entries.push_back({lam, e.b});
        DiscreteMeasure lhs = convolve_power(two_point_gamma(e.b), e.M);
        DiscreteMeasure rhs = standard_poisson(lam, e.b, opt.eps_trunc);
        double tv = total_variation(lhs, rhs);
        double bound = 4.0 * std::exp(-e.b);
        check_bound("Prokhorov bound at b=" + fmt(e.b), tv, bound, defect_slack(lhs, rhs));
        res.checks.push_back({tv, bound});
        terms.push_back(tv);
    }
    res.prokhorov = numbered_series("prokhorov", std::move(terms),
                                finite_options(spec.entries.size(), opt));
    return res;
}

PoissonToItpfiResult poisson_to_itpfi2(const std::vector<DiscreteMeasure>& intensities, const PipelineOptions& opt) {
    std::map<long, std::vector<Atom>> slices;
    for (const auto& eta : intensities) {
        if (eta.defect() != 0.0) throw DomainError("intensity measures must not carry a defect");
        for (const auto& a : eta.atoms()) {
            if (!(a.pos > 0.0)) throw DomainError("intensity measures must live on (0, inf)");
            long k = static_cast<long>(std::ceil(a.pos)) - 1;
            slices[k].push_back(a);
        }
    }
    PoissonToItpfiResult res;
    std::vector<double> conc, lip, prok;
    for (auto& [k, atoms] : slices) {
        DiscreteMeasure zeta(atoms);
        if (k == 0) {
            res.discarded = zeta;
            continue;
        }
        Moments mo = moments(zeta);
        SliceReport s{};
        s.k = k;
        s.lambda = mo.mass;
        s.b = mo.mean;
        s.lambda_prime = lambda_prime(s.b);
        s.M = std::max(1L, std::lround(s.lambda / s.lambda_prime));
        s.intensity_gap = std::abs(static_cast<double>(s.M) * s.lambda_prime - s.lambda);
        if (s.intensity_gap > s.lambda_prime * (1.0 + 1e-12)) throw InternalError("rounded multiplicity misses lambda");
        s.concentration = second_moment_about(zeta, s.b);
        if (zeta.size() <= 8 && s.lambda <= 8.0) {
            DiscreteMeasure e1 = compound_poisson(zeta, opt.eps_trunc);
            DiscreteMeasure e2 = standard_poisson(s.lambda, s.b, opt.eps_trunc);
            double w = wasserstein2(e1, e2).distance;
            s.w2_sq_exact = w * w;
            check_bound("W2 concentration at slice " + std::to_string(k), w * w, s.concentration, 1e-9);
        }
        double lam_itpfi = static_cast<double>(s.M) * s.lambda_prime;
        DiscreteMeasure ea = standard_poisson(s.lambda, s.b, opt.eps_trunc);
        DiscreteMeasure eb = standard_poisson(lam_itpfi, s.b, opt.eps_trunc);
        s.lipschitz = {total_variation(ea, eb), 2.0 * s.intensity_gap};
        check_bound("intensity Lipschitz bound at slice " + std::to_string(k), s.lipschitz.exact, s.lipschitz.bound,
                    defect_slack(ea, eb));
        DiscreteMeasure g = convolve_power(two_point_gamma(s.b), s.M);
        s.prokhorov = {total_variation(eb, g), 4.0 * s.lambda_prime};
        check_bound("Prokhorov bound at slice " + std::to_string(k), s.prokhorov.exact, s.prokhorov.bound,
                    defect_slack(eb, g));
        res.spec.entries.push_back({s.b, s.M});
        conc.push_back(s.concentration);
        lip.push_back(s.lipschitz.exact);
        prok.push_back(s.prokhorov.exact);
        res.slices.push_back(std::move(s));
    }
    auto so = finite_options(res.slices.size(), opt);
    res.concentration = numbered_series("w2_concentration", std::move(conc), so);
    res.lipschitz = numbered_series("intensity_lipschitz", std::move(lip), so);
    res.prokhorov = numbered_series("prokhorov", std::move(prok), so);
    return res;
}

TwoPointToPoissonResult two_point_to_poisson(const std::vector<DiscreteMeasure>& family, double variance_cap,
                                             const PipelineOptions& opt) {
    if (!(variance_cap > 0.0)) throw DomainError("variance cap must be positive");
    TwoPointToPoissonResult res;
    struct Member {
        std::size_t idx;
        double d;
        double p;
    };
    std::map<long, std::vector<Member>> buckets;
    for (std::size_t n = 0; n < family.size(); ++n) {
        const auto& mu = family[n];
        if (mu.size() != 2 || !mu.is_probability() || mu.defect() != 0.0)
            throw DomainError("two-point family member " + std::to_string(n) + " is not a two-atom probability measure");
        double var = moments(mu).variance;
        if (var > variance_cap)
            throw DomainError("bounded-variance hypothesis violated: Var(mu_" + std::to_string(n) + ") = " + fmt(var) +
                              " > " + fmt(variance_cap));
        const Atom& lo = mu.atoms()[0];
        const Atom& hi = mu.atoms()[1];
        const Atom& heavy = lo.mass >= hi.mass ? lo : hi;
        const Atom& light = lo.mass >= hi.mass ? hi : lo;
        res.translations.push_back(-heavy.pos);
        double d = light.pos - heavy.pos;
        long k = static_cast<long>(std::floor(d));
        if (k >= -1 && k <= 1) {
            res.discarded.push_back(n);
            res.discarded_variance += var;
            continue;
        }
        buckets[k].push_back({n, d, light.mass});
    }
    std::vector<double> w2, lc;
    for (auto& [k, members] : buckets) {
        TwoPointBucket B{};
        B.k = k;
        std::vector<double> ds;
        double sp2 = 0.0;
        for (const auto& m : members) {
            B.members.push_back(m.idx);
            ds.push_back(m.d);
            B.lambda += m.p;
            sp2 += m.p * m.p;
        }
        B.b = middle_point(ds);
        for (const auto& m : members) B.w2_term += m.p * (B.b - m.d) * (B.b - m.d);
        B.lecam_sup = sp2 / B.lambda;
        B.lecam_l1 = 2.0 * B.lecam_sup;
        double km1 = static_cast<double>(std::labs(k) - 1);
        B.majorant = 2.0 * variance_cap / (km1 * km1);
        check_bound("Le Cam majorant at bucket " + std::to_string(k), B.lecam_sup, B.majorant);
        std::vector<DiscreteMeasure> parts;
        for (const auto& m : members) parts.push_back(DiscreteMeasure({{0.0, 1.0 - m.p}, {B.b, m.p}}));
        DiscreteMeasure bern = convolve_all(parts);
        DiscreteMeasure pois = standard_poisson(B.lambda, B.b, opt.eps_trunc);
        B.tv_exact = total_variation(bern, pois);
        check_bound("Le Cam bound at bucket " + std::to_string(k), *B.tv_exact, B.lecam_l1, defect_slack(bern, pois));
        res.spec.entries.push_back({B.lambda, B.b});
        w2.push_back(B.w2_term);
        lc.push_back(*B.tv_exact);
        res.buckets.push_back(std::move(B));
    }
    res.spec.positive_type = std::all_of(res.spec.entries.begin(), res.spec.entries.end(),
                                         [](const PoissonFlowEntry& e) { return e.b > 0.0; });
    auto so = finite_options(res.buckets.size(), opt);
    res.wasserstein = numbered_series("w2_concentration", std::move(w2), so);
    res.lecam = numbered_series("le_cam", std::move(lc), so);
    return res;
}

PoissonToTwoPointResult poisson_to_two_point(const PoissonFlowSpec& spec, double cap_ratio, const PipelineOptions& opt) {
    spec.validate();
    if (!(cap_ratio > 0.0 && cap_ratio < 1.0)) throw DomainError("mass cap ratio must lie in (0, 1)");
    PoissonToTwoPointResult res;
    std::vector<double> terms;
    for (std::size_t i = 0; i < spec.entries.size(); ++i) {
        const auto& e = spec.entries[i];
        double eps = std::pow(cap_ratio, static_cast<double>(i + 1));
        double Md = std::ceil(e.lambda / eps * (1.0 - 1e-15));
        if (Md > 9e15) throw CapacityError("two-point multiplicity overflows");
        long M = std::max(1L, static_cast<long>(Md));
        while (e.lambda / static_cast<double>(M) > eps) ++M;
        double p = e.lambda / static_cast<double>(M);
        DiscreteMeasure eta({{0.0, 1.0 - p}, {e.b, p}});
        double var = p * (1.0 - p) * e.b * e.b;
        check_bound("two-point variance", var, e.lambda * e.b * e.b / static_cast<double>(M));
        res.sup_variance = std::max(res.sup_variance, var);
        double bound = 4.0 * p;
        double exact = bound;
        if (M <= kExactPowerLimit) {
            DiscreteMeasure lhs = standard_poisson(e.lambda, e.b, opt.eps_trunc);
            DiscreteMeasure rhs = convolve_power(eta, M);
            exact = total_variation(lhs, rhs);
            check_bound("two-point Prokhorov bound", exact, bound, defect_slack(lhs, rhs));
        }
        res.checks.push_back({exact, bound});
        terms.push_back(exact);
        res.family.push_back({M, std::move(eta)});
    }
    res.prokhorov = numbered_series("prokhorov", std::move(terms),
                                finite_options(spec.entries.size(), opt));
    return res;
}

AlmostPeriodicTarget stock_rotation_target(double theta, std::size_t characters) {
    AlmostPeriodicTarget t;
    t.thetas.reserve(characters);
    for (std::size_t j = 0; j < characters; ++j) {
        long mult = j == 0 ? 0 : (j % 2 == 1 ? static_cast<long>((j + 1) / 2) : -static_cast<long>(j / 2));
        double v = std::fmod(static_cast<double>(mult) * theta, 1.0);
        if (v < 0.0) v += 1.0;
        t.thetas.push_back(v);
    }
    t.seeds = MeasureSequence(
        IndexDomain::Naturals,
        [](long n) {
            double p = std::ldexp(1.0, -static_cast<int>(n));
            return DiscreteMeasure({{0.0, 1.0 - p}, {1.0, p}});
        },
        "geometric_seeds");
    // 1 - |eta^|^2 = 2 p (1 - p)(1 - cos w) <= 4 p with p = 2^-n.
    t.seed_envelope = TermEnvelope::geometric(4.0, 0.5, 1);
    t.provenance = "assumed, per cited literature";
    return t;
}

AlmostPeriodicResult almost_periodic_pipeline(const AlmostPeriodicTarget& target, const AlmostPeriodicOptions& opt) {
    const auto& th = target.thetas;
    if (th.empty() || th[0] != 0.0) throw DomainError("character enumeration must start with theta_0 = 0");
    if (opt.depth < 1) throw DomainError("depth must be >= 1");
    const long H = opt.seed_horizon;
    if (H < 4) throw DomainError("seed horizon too small");
    const std::size_t J = th.size();
    std::vector<double> omega(J);
    for (std::size_t j = 0; j < J; ++j) omega[j] = 2.0 * std::numbers::pi * th[j];

    std::vector<DiscreteMeasure> sym(static_cast<std::size_t>(H) + 1);
    // xs[j][m] = |eta_m^(omega_j)|^2, the transform of eta_m * reflect(eta_m)
    std::vector<std::vector<double>> xs(J, std::vector<double>(static_cast<std::size_t>(H) + 1, 1.0));
    for (long m = 1; m <= H; ++m) {
        DiscreteMeasure eta = target.seeds.at(m);
        if (!eta.is_probability()) throw DomainError("seed measures must be probability measures");
        for (const auto& a : eta.atoms())
            if (a.pos != std::round(a.pos)) throw DomainError("seed measures must live on the integers");
        sym[static_cast<std::size_t>(m)] = convolve(eta, reflect(eta));
        for (std::size_t j = 0; j < J; ++j) xs[j][static_cast<std::size_t>(m)] = std::norm(char_fn(eta, omega[j]));
    }
    double tail = 0.0;
    const bool certified = target.seed_envelope.has_value();
    if (certified) {
        const auto& env = *target.seed_envelope;
        for (std::size_t j = 0; j < J; ++j)
            for (long m = std::max(1L, env.from); m <= H; ++m)
                if (1.0 - xs[j][static_cast<std::size_t>(m)] > env.at(m) * (1.0 + 1e-9) + 1e-15)
                    throw DomainError("seed envelope does not dominate 1 - |eta_m^|^2 at m=" + std::to_string(m));
        tail = env.tail_after(H, false);
    }
    // suffix[j][n] = prod_{m=n+1}^{H} xs[j][m]
    std::vector<std::vector<double>> suffix(J, std::vector<double>(static_cast<std::size_t>(H) + 1, 1.0));
    for (std::size_t j = 0; j < J; ++j)
        for (long n = H - 1; n >= 0; --n)
            suffix[j][static_cast<std::size_t>(n)] =
                suffix[j][static_cast<std::size_t>(n) + 1] * xs[j][static_cast<std::size_t>(n) + 1];
    auto lower = [&](std::size_t j, long n) { return suffix[j][static_cast<std::size_t>(n)] * std::max(0.0, 1.0 - tail); };
    // Without an envelope the unseen tail is unknown, so keep at least half the seeds after n_k.
    const long n_limit = certified ? H : H / 2;

    AlmostPeriodicResult res;
    res.certified_contraction = certified;
    long prev = 0;
    for (long k = 1; k <= opt.depth; ++k) {
        const std::size_t fk = std::min<std::size_t>(static_cast<std::size_t>(k), J);
        const std::size_t fk1 = std::min<std::size_t>(static_cast<std::size_t>(k) + 1, J);
        const double need = 1.0 - std::pow(static_cast<double>(k + 1), -3.0);
        long nk = -1;
        for (long n = prev + 1; n <= n_limit; ++n) {
            bool ok = true;
            for (std::size_t j = 0; j < fk1 && ok; ++j) ok = lower(j, n) > need;
            if (ok) {
                nk = n;
                break;
            }
        }
        if (nk < 0)
            throw NoContraction("no block end n_" + std::to_string(k) +
                                " makes the remaining seed product exceed 1 - (k+1)^-3 on the first " +
                                std::to_string(fk1) + " characters");
        DiscreteMeasure alpha = DiscreteMeasure::dirac(0.0);
        for (long m = prev + 1; m <= nk; ++m) alpha = convolve(alpha, sym[static_cast<std::size_t>(m)]);
        double min_tr = 1.0;
        for (std::size_t j = 0; j < fk; ++j) min_tr = std::min(min_tr, char_fn(alpha, omega[j]).real());
        const double tol = std::pow(static_cast<double>(k), -3.0);
        if (k >= 2 && min_tr < 1.0 - tol - 1e-12) {
            if (certified) throw BoundViolation("block transform below 1 - k^-3 at k=" + std::to_string(k));
        }
        const long m_min = 1 - static_cast<long>(std::llround(alpha.min_pos()));
        long shift = 0;
        bool found = false;
        for (long m = m_min; m <= m_min + opt.translation_budget; ++m) {
            bool ok = true;
            for (std::size_t j = 0; j < fk && ok; ++j) {
                double frac = std::fmod(th[j] * static_cast<double>(m), 1.0);
                ok = 2.0 * std::abs(std::sin(std::numbers::pi * frac)) < tol;
            }
            if (ok) {
                shift = m;
                found = true;
                break;
            }
        }
        if (!found)
            throw NoTranslation("no translation within budget brings the first " + std::to_string(fk) +
                                " characters within k^-3 of 1 at k=" + std::to_string(k));
        AlmostPeriodicBlock blk{k, prev + 1, nk, shift, min_tr, translate(alpha, static_cast<double>(shift))};
        for (const auto& a : blk.gamma.atoms())
            res.spec.entries.push_back({static_cast<double>(k) * a.mass, a.pos});
        res.blocks.push_back(std::move(blk));
        prev = nk;
    }
    res.spec.positive_type = true;

    for (std::size_t j = 0; j < J; ++j) {
        std::vector<double> terms;
        for (const auto& blk : res.blocks) {
            double re = char_fn(blk.gamma, omega[j]).real();
            double kk = static_cast<double>(blk.k);
            terms.push_back(std::clamp(1.0 - std::exp(-kk * (1.0 - re)), 0.0, 1.0));
        }
        SeriesOptions so;
        so.horizon = opt.depth;
        if (certified) {
            // omega_j is in F_k for k > j, where 1 - |beta_k^| <= k (1 - Re gamma_k^) <= 2 k^-2.
            so.envelope = TermEnvelope::power(2.0, 2.0, static_cast<long>(j) + 1);
            so.envelope_from_theorem = true;
        }
        res.eigenvalues.push_back(numbered_series("eigenvalue(theta=" + fmt(th[j]) + ")", std::move(terms), so));
    }
    return res;
}

SplitResult split_divisible(const PoissonFlowSpec& spec, long L, double eps_trunc) {
    spec.validate();
    if (L < 1) throw DomainError("split factor must be >= 1");
    SplitResult res;
    res.spec.positive_type = spec.positive_type;
    for (const auto& e : spec.entries) {
        double lam = e.lambda / static_cast<double>(L);
        res.spec.entries.push_back({lam, e.b});
        DiscreteMeasure piece = standard_poisson(lam, e.b, eps_trunc);
        DiscreteMeasure whole = standard_poisson(e.lambda, e.b, eps_trunc);
        DiscreteMeasure powered = convolve_power(piece, L);
        res.tv_check.push_back(total_variation(powered, whole));
        res.defect_budget.push_back(2.0 * (powered.defect() + whole.defect()));
    }
    return res;
}

BinomialCheck binomial_approx_check(double alpha, double beta, const DiscreteMeasure& P, const DiscreteMeasure& Q,
                                    long L) {
    if (!(alpha >= 0.0) || !(beta > 0.0 && beta <= 1.0)) throw DomainError("binomial check needs alpha >= 0, 0 < beta <= 1");
    if (L < 0) throw DomainError("binomial check needs L >= 0");
    if (!P.is_probability() || !Q.is_probability()) throw DomainError("P and Q must be probability measures");
    const double s = 1.0 + alpha + beta;
    BinomialCheck r{};
    r.K = L - static_cast<long>(std::floor(beta * static_cast<double>(L) / s));
    r.M = static_cast<long>(std::floor((1.0 + beta) * static_cast<double>(L) / s));
    DiscreteMeasure d0 = DiscreteMeasure::dirac(0.0);
    DiscreteMeasure rho = mix({d0, P, Q}, {1.0 / s, alpha / s, beta / s});
    DiscreteMeasure rho_hat = mix({d0, P}, {1.0 / (1.0 + alpha), alpha / (1.0 + alpha)});
    DiscreteMeasure gam = mix({d0, Q}, {1.0 / (1.0 + beta), beta / (1.0 + beta)});
    DiscreteMeasure lhs = convolve_power(rho, L);
    DiscreteMeasure rhs = convolve(convolve_power(rho_hat, r.K), convolve_power(gam, r.M));
    r.tv_exact = total_variation(lhs, rhs);
    r.bound = 4.0 * std::sqrt(beta);
    return r;
}

ItpfiReduceResult itpfi_bounded_reduce(const std::vector<std::vector<double>>& a, const ReduceOptions& opt) {
    if (a.empty()) throw DomainError("no states to reduce");
    const std::size_t N = a[0].size();
    if (N == 0) throw DomainError("states need at least one coordinate");
    for (const auto& row : a) {
        if (row.size() != N) throw DomainError("all states must have the same number of coordinates");
        for (double v : row)
            if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("state parameters must be finite and >= 0");
    }
    const std::size_t T = a.size();
    ItpfiReduceResult res;
    res.b_per_state.assign(T, std::vector<double>(N, 0.0));

    // Buckets J_{k,i}: states whose i-th parameter lies in [k-1, k).
    std::map<std::pair<long, std::size_t>, std::vector<std::size_t>> buckets;
    for (std::size_t n = 0; n < T; ++n)
        for (std::size_t i = 0; i < N; ++i)
            buckets[{static_cast<long>(std::floor(a[n][i])) + 1, i}].push_back(n);
    std::vector<double> conc;
    for (const auto& [key, members] : buckets) {
        const auto [k, i] = key;
        double b = 0.0;
        if (k >= 2 || opt.concentrate_first_bucket) {
            std::vector<double> vals;
            for (std::size_t n : members) vals.push_back(a[n][i]);
            b = middle_point(vals);
        }
        double term = 0.0;
        for (std::size_t n : members) {
            res.b_per_state[n][i] = b;
            double d = b - a[n][i];
            term += std::exp(-a[n][i]) * d * d;
        }
        conc.push_back(term);
    }
    SeriesOptions fin;
    fin.threshold_diverge = opt.threshold_diverge;
    fin.horizon = static_cast<long>(conc.size());
    fin.envelope = TermEnvelope::zero(static_cast<long>(conc.size()) + 1);
    res.concentration = numbered_series("b_concentration", std::move(conc), fin);

    std::vector<double> w2s, h2s;
    for (std::size_t n = 0; n < T; ++n) {
        const auto& an = a[n];
        const auto& bn = res.b_per_state[n];
        double z = 1.0, est = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            z += std::exp(-an[i]);
            double d = bn[i] - an[i];
            est += std::exp(-an[i]) * d * d;
        }
        std::vector<Atom> moved{{0.0, 1.0 / z}};
        for (std::size_t i = 0; i < N; ++i) moved.push_back({bn[i], std::exp(-an[i]) / z});
        DiscreteMeasure mu = rho_state(an), mu1(moved), mu2 = rho_state(bn);
        double w = wasserstein2(mu, mu1).distance;
        check_bound("W2 mixture estimate at state " + std::to_string(n), w * w, est / z, 1e-14);
        double h = hellinger_sq(mu1, mu2);
        check_bound("Hellinger estimate at state " + std::to_string(n), h, 2.0 * est, 1e-14);
        w2s.push_back(w * w);
        h2s.push_back(h);
    }
    fin.horizon = static_cast<long>(T);
    fin.envelope = TermEnvelope::zero(static_cast<long>(T) + 1);
    res.wasserstein = make_series("w2_moved_atoms", one_based(T), std::move(w2s), fin);
    res.hellinger = make_series("hellinger_rho_states", one_based(T), std::move(h2s), fin);

    for (const auto& bn : res.b_per_state) res.distinct_b.insert(res.distinct_b.end(), bn.begin(), bn.end());
    std::sort(res.distinct_b.begin(), res.distinct_b.end());
    res.distinct_b.erase(std::unique(res.distinct_b.begin(), res.distinct_b.end(), same_position), res.distinct_b.end());
    auto canonical = [&](double v) {
        auto it = std::lower_bound(res.distinct_b.begin(), res.distinct_b.end(), v,
                                   [](double x, double y) { return x < y && !same_position(x, y); });
        return *it;
    };
    std::map<std::vector<double>, long> groups;
    for (const auto& bn : res.b_per_state) {
        std::vector<double> th;
        for (double v : bn) th.push_back(canonical(v));
        std::sort(th.begin(), th.end());
        ++groups[th];
    }

    std::map<double, long> gamma_counts;
    std::vector<double> split_terms;
    for (const auto& [th, count] : groups) {
        ReducedGroup g{th, count, 0, 0, std::nullopt};
        const double bN = th.back();
        if (N == 1) {
            g.M = count;
        } else {
            double alpha = 0.0;
            std::vector<Atom> pa;
            for (std::size_t i = 0; i + 1 < N; ++i) {
                alpha += std::exp(-th[i]);
                pa.push_back({th[i], std::exp(-th[i])});
            }
            DiscreteMeasure P = normalize(DiscreteMeasure(pa));
            double beta = std::exp(-bN);
            auto bc = binomial_approx_check(alpha, beta, P, DiscreteMeasure::dirac(bN), count);
            check_bound("binomial split for a reduced group", bc.tv_exact, bc.bound);
            g.K = bc.K;
            g.M = bc.M;
            g.split = bc;
            split_terms.push_back(bc.tv_exact);
            std::vector<double> hat(th.begin(), th.end() - 1);
            if (g.K > 0) res.rho_part.push_back({hat, g.K});
        }
        if (g.M > 0 && bN > 0.0) gamma_counts[bN] += g.M;
        res.groups.push_back(std::move(g));
    }
    for (const auto& [b, M] : gamma_counts) res.gamma_part.entries.push_back({b, M});
    fin.horizon = static_cast<long>(split_terms.size());
    fin.envelope = TermEnvelope::zero(static_cast<long>(split_terms.size()) + 1);
    res.split = numbered_series("binomial_split", std::move(split_terms), fin);
    return res;
}

}  // namespace flowlab
