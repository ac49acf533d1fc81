#include "flowlab/tail_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "flowlab/errors.hpp"
#include "flowlab/parallel.hpp"

namespace flowlab {

namespace {

SeriesOptions series_options(const MeasureSequence& seq, const TailOptions& opt) {
    SeriesOptions so;
    so.horizon = opt.horizon;
    so.two_sided = seq.domain() == IndexDomain::Integers;
    so.threshold_diverge = opt.threshold_diverge;
    so.envelope = opt.envelope;
    return so;
}

std::vector<double> eval_terms(const std::vector<long>& idx, const std::function<double(long)>& f) {
    std::vector<double> out(idx.size());
    parallel_for(idx.size(), [&](std::size_t i) { out[i] = f(idx[i]); });
    return out;
}

}  // namespace

CertificateSeries eigenvalue_certificate(const MeasureSequence& seq, double omega, const TailOptions& opt) {
    auto idx = seq.window(opt.horizon);
    auto terms = eval_terms(idx, [&](long n) { return std::clamp(1.0 - std::abs(seq.char_fn(n, omega)), 0.0, 1.0); });
    std::ostringstream name;
    name.precision(17);
    name << "eigenvalue(" << seq.label() << ", omega=" << omega << ")";
    return make_series(name.str(), std::move(idx), std::move(terms), series_options(seq, opt));
}

Extractor interval_extractor(Interval I, double mass_cap) {
    return [I, mass_cap](long, const DiscreteMeasure& mu) {
        DiscreteMeasure r = restrict(mu, I);
        DiscreteMeasure beta(r.atoms(), 0.0);
        double m = beta.total_mass();
        if (m > mass_cap) beta = scale_mass(beta, mass_cap / m);
        return beta;
    };
}

CertificateSeries periodicity_score(const MeasureSequence& seq, const Extractor& extract, double width_cap,
                                    const TailOptions& opt) {
    auto idx = seq.window(opt.horizon);
    auto terms = eval_terms(idx, [&](long n) {
        DiscreteMeasure mu = seq.at(n);
        DiscreteMeasure beta = extract(n, mu);
        if (!beta.dominated_by(mu)) throw ExtractionError("extracted measure is not dominated by mu_n at n=" + std::to_string(n));
        if (beta.empty()) return 0.0;
        if (beta.width() > width_cap * (1.0 + 1e-12))
            throw ExtractionError("extracted measure wider than the cap at n=" + std::to_string(n));
        Moments mo = moments(beta);
        return mo.mass * mo.variance;
    });
    return make_series("periodicity(" + seq.label() + ")", std::move(idx), std::move(terms), series_options(seq, opt));
}

double middle_point(std::vector<double> values) {
    if (values.empty()) throw DomainError("middle point of an empty block");
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

BlockConcentration concentrate_block(const std::vector<DiscreteMeasure>& betas, double p, double q) {
    if (!(p >= 0.0) || !(q >= 0.0)) throw DomainError("concentration weights must be nonnegative");
    std::vector<double> means;
    means.reserve(betas.size());
    for (const auto& b : betas) {
        if (!b.is_probability()) throw DomainError("concentration needs probability measures");
        means.push_back(moments(b).mean);
    }
    double t = middle_point(means);
    double term = 0.0;
    for (const auto& b : betas) term += p * q * second_moment_about(b, t);
    return {t, term};
}

ConcentrationResult concentration_points(const MeasureSequence& seq, const std::vector<ConcentrationBlock>& blocks,
                                         double width_cap, const TailOptions& opt) {
    ConcentrationResult res;
    std::vector<long> idx;
    std::vector<double> terms;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& B = blocks[k];
        const Interval& I = B.interval;
        bool clear = (I.lo >= 1.0) || (I.hi <= -1.0);
        if (!clear) throw DomainError("concentration interval must avoid (-1, 1)");
        if (I.length() > width_cap) throw DomainError("concentration interval longer than the width cap");
        std::vector<DiscreteMeasure> betas;
        for (long n : B.indices) {
            DiscreteMeasure mu = seq.at(n);
            DiscreteMeasure r = restrict(mu, I);
            DiscreteMeasure part(r.atoms(), 0.0);
            if (part.empty()) throw ExtractionError("mu_n has no mass in the block interval at n=" + std::to_string(n));
            DiscreteMeasure beta = normalize(part);
            std::vector<Atom> dom{{0.0, B.p}};
            for (const auto& a : beta.atoms()) dom.push_back({a.pos, B.q * a.mass});
            if (!DiscreteMeasure(dom).dominated_by(mu))
                throw DomainError("p delta_0 + q beta_n is not dominated by mu_n at n=" + std::to_string(n));
            betas.push_back(std::move(beta));
        }
        auto bc = concentrate_block(betas, B.p, B.q);
        res.middle_points.push_back(bc.middle);
        idx.push_back(static_cast<long>(k + 1));
        terms.push_back(bc.term);
    }
    SeriesOptions so;
    so.horizon = static_cast<long>(blocks.size());
    so.threshold_diverge = opt.threshold_diverge;
    so.envelope = opt.envelope;
    res.series = make_series("concentration(" + seq.label() + ")", std::move(idx), std::move(terms), so);
    return res;
}

CertificateSeries equivalence_certificate(const MeasureSequence& a, const MeasureSequence& b, EquivMetric metric,
                                          double kappa, const TailOptions& opt, std::size_t lp_limit) {
    if (a.domain() != b.domain()) throw DomainError("equivalence needs sequences over the same index set");
    auto idx = a.window(opt.horizon);
    auto terms = eval_terms(idx, [&](long n) {
        DiscreteMeasure x = a.at(n), y = b.at(n);
        switch (metric) {
            case EquivMetric::Hellinger: return hellinger_sq(x, y);
            case EquivMetric::TotalVariation: return total_variation(x, y);
            case EquivMetric::W2Cutoff: {
                double d = wasserstein2_cutoff(x, y, kappa, CutoffMode::Exact, lp_limit).distance;
                return d * d;
            }
        }
        return 0.0;
    });
    const char* mname = metric == EquivMetric::Hellinger ? "hellinger_sq"
                        : metric == EquivMetric::TotalVariation ? "tv"
                                                                : "w2k_sq";
    return make_series(std::string("equivalence(") + mname + ", " + a.label() + ", " + b.label() + ")",
                       std::move(idx), std::move(terms), series_options(a, opt));
}

WalkResult simulate_walk(const MeasureSequence& seq, long horizon, long samples, std::uint64_t seed, long block_size) {
    if (horizon < 1 || samples < 2) throw DomainError("walk needs horizon >= 1 and at least two samples");
    auto idx = seq.window(horizon);
    const std::size_t N = idx.size();
    std::vector<std::vector<double>> pos(N), cdf(N);
    WalkResult r;
    r.horizon = horizon;
    r.samples = samples;
    r.seed = seed;
    r.block_size = block_size > 0 ? block_size : std::max(1L, horizon / 10);
    for (std::size_t k = 0; k < N; ++k) {
        DiscreteMeasure mu = seq.at(idx[k]);
        if (!mu.is_probability()) throw DomainError("walk steps must be probability measures");
        double c = 0.0;
        for (const auto& a : mu.atoms()) {
            pos[k].push_back(a.pos);
            c += a.mass;
            cdf[k].push_back(c);
        }
        Moments mo = moments(mu);
        r.expected_mean += mo.mean;
        r.expected_variance += mo.variance;
    }
    const std::size_t nblocks = (N + static_cast<std::size_t>(r.block_size) - 1) / static_cast<std::size_t>(r.block_size);
    std::vector<double> block_acc(static_cast<std::size_t>(samples) * nblocks, 0.0);
    r.sums.assign(static_cast<std::size_t>(samples), 0.0);
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
        std::mt19937_64 gen(ss);
        double s = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            double u = static_cast<double>(gen() >> 11) * 0x1.0p-53 * cdf[k].back();
            std::size_t j = static_cast<std::size_t>(std::upper_bound(cdf[k].begin(), cdf[k].end(), u) - cdf[k].begin());
            j = std::min(j, pos[k].size() - 1);
            s += pos[k][j];
            block_acc[i * nblocks + k / static_cast<std::size_t>(r.block_size)] += pos[k][j];
        }
        r.sums[i] = s;
    });
    double m = 0.0;
    for (double s : r.sums) m += s;
    m /= static_cast<double>(samples);
    double v = 0.0;
    for (double s : r.sums) v += (s - m) * (s - m);
    v /= static_cast<double>(samples - 1);
    r.mean = m;
    r.variance = v;
    r.block_means.assign(nblocks, 0.0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(samples); ++i)
        for (std::size_t b = 0; b < nblocks; ++b) r.block_means[b] += block_acc[i * nblocks + b];
    for (auto& b : r.block_means) b /= static_cast<double>(samples);
    double se = std::sqrt(r.expected_variance / static_cast<double>(samples));
    r.z_score = se > 0.0 ? (m - r.expected_mean) / se : (m == r.expected_mean ? 0.0 : INFINITY);
    return r;
}

}  // namespace flowlab
