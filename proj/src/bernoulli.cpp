#include "flowlab/bernoulli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flowlab/errors.hpp"
#include "flowlab/metrics.hpp"
#include "flowlab/parallel.hpp"

namespace flowlab {

namespace {

constexpr double kEmpiricalTol = 1e-8;

// Materialized mu_n for n in [lo, hi].
class Cache {
public:
    Cache(const BernoulliFamily& fam, long lo, long hi) : lo_(lo), items_(static_cast<std::size_t>(hi - lo + 1)) {
        parallel_for(items_.size(), [&](std::size_t i) { items_[i] = fam.at(lo + static_cast<long>(i)); });
    }
    const DiscreteMeasure& operator[](long n) const { return items_[static_cast<std::size_t>(n - lo_)]; }

private:
    long lo_;
    std::vector<DiscreteMeasure> items_;
};

SeriesOptions two_sided(const BernoulliOptions& opt) {
    SeriesOptions so;
    so.horizon = opt.horizon;
    so.two_sided = true;
    so.threshold_diverge = opt.threshold_diverge;
    so.envelope = opt.envelope;
    return so;
}

// Zero envelope beyond `from` when the family is eventually constant and cond holds.
void add_limit_envelope(SeriesOptions& so, const BernoulliFamily& fam, long extra, bool cond = true) {
    if (so.envelope || !fam.constant_beyond() || !cond) return;
    so.envelope = TermEnvelope::zero(*fam.constant_beyond() + extra + 1);
}

bool empirically_convergent(const CertificateSeries& s) {
    if (s.terms.size() < 8) return false;
    std::size_t start = s.terms.size() - s.terms.size() / 4;
    for (std::size_t i = start; i < s.terms.size(); ++i)
        if (s.terms[i] > kEmpiricalTol) return false;
    return true;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

BernoulliFamily::BernoulliFamily(std::vector<std::string> labels, Generator gen, std::string name,
                                 std::optional<long> constant_beyond)
    : labels_(std::move(labels)), gen_(std::move(gen)), name_(std::move(name)), constant_beyond_(constant_beyond) {
    if (labels_.empty()) throw DomainError("Bernoulli family needs at least one atom");
    if (constant_beyond_ && *constant_beyond_ < 0) throw DomainError("constant_beyond must be >= 0");
}

DiscreteMeasure BernoulliFamily::at(long n) const {
    if (constant_beyond_) {
        long c = *constant_beyond_ + 1;
        n = std::clamp(n, -c, c);
    }
    DiscreteMeasure mu = gen_(n);
    if (!mu.is_probability()) throw DomainError("family member mu_" + std::to_string(n) + " is not a probability measure");
    for (const auto& a : mu.atoms()) {
        double r = std::round(a.pos);
        if (a.pos != r || r < 0.0 || r >= static_cast<double>(labels_.size()))
            throw DomainError("family member mu_" + std::to_string(n) + " charges a point outside the base space");
    }
    return mu;
}

std::size_t BernoulliFamily::label_index(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label) return i;
    throw DomainError("unknown atom label '" + label + "'");
}

CertificateSeries kakutani_check(const BernoulliFamily& fam, long g, const BernoulliOptions& opt) {
    const long N = opt.horizon, G = std::labs(g);
    Cache c(fam, -N - G, N + G);
    auto idx = index_window(IndexDomain::Integers, N);
    std::vector<double> terms(idx.size());
    parallel_for(idx.size(), [&](std::size_t i) { terms[i] = hellinger_sq(c[g + idx[i]], c[idx[i]]); });
    auto so = two_sided(opt);
    add_limit_envelope(so, fam, G);
    return make_series("kakutani(" + fam.name() + ", g=" + std::to_string(g) + ")", std::move(idx), std::move(terms), so);
}

CertificateSeries cocycle_norm(const BernoulliFamily& fam, long k, const BernoulliOptions& opt) {
    const long N = opt.horizon, K = std::labs(k);
    Cache c(fam, -N - K, N + K);
    auto idx = index_window(IndexDomain::Integers, N);
    std::vector<double> terms(idx.size());
    parallel_for(idx.size(), [&](std::size_t i) { terms[i] = 2.0 * hellinger_sq(c[idx[i] + k], c[idx[i]]); });
    auto so = two_sided(opt);
    add_limit_envelope(so, fam, K);
    return make_series("cocycle_norm(" + fam.name() + ", k=" + std::to_string(k) + ")", std::move(idx),
                       std::move(terms), so);
}

double cocycle_norm_reindexed(const BernoulliFamily& fam, long k, long horizon) {
    // Sum over m' = m + k of 2 H^2(mu_{m' - k}, mu_{m'}), i.e. the shift -k on the moved window.
    const long K = std::labs(k);
    Cache c(fam, -horizon - K, horizon + K);
    double s = 0.0;
    for (long m : index_window(IndexDomain::Integers, horizon)) {
        long mp = m + k;
        s += 2.0 * hellinger_sq(c[mp - k], c[mp]);
    }
    return s;
}

std::optional<DissipativityWitness> limit_witness(const BernoulliFamily& fam) {
    if (!fam.constant_beyond()) return std::nullopt;
    long N0 = *fam.constant_beyond();
    double d2 = hellinger_sq(fam.at(-N0 - 1), fam.at(N0 + 1));
    if (!(d2 > 1e-15)) return std::nullopt;
    // For k > 2 N0 + 1 at least k - 2 N0 - 1 shifts straddle the two constant regions.
    return DissipativityWitness{2.0 * d2, 2 * N0 + 1, "limits differ beyond |n| > " + std::to_string(N0)};
}

DissipativityResult dissipativity_certificate(const BernoulliFamily& fam, long k_range, long horizon,
                                              std::optional<DissipativityWitness> witness, double threshold_diverge) {
    if (k_range < 0 || horizon < 0) throw DomainError("dissipativity needs nonnegative ranges");
    const long span = horizon + k_range;
    Cache c(fam, -span, span);
    const long W = 2 * horizon + 1;
    // h2[d][m] = H^2(mu_{m+d}, mu_m) for d in [0, k_range]; negative shifts follow by symmetry.
    std::vector<std::vector<double>> h2(static_cast<std::size_t>(k_range) + 1);
    parallel_for(h2.size(), [&](std::size_t d) {
        h2[d].resize(static_cast<std::size_t>(W + k_range + static_cast<long>(d)) + 1);
        for (long m = -horizon - static_cast<long>(d); m <= horizon; ++m)
            h2[d][static_cast<std::size_t>(m + horizon + static_cast<long>(d))] =
                hellinger_sq(c[m + static_cast<long>(d)], c[m]);
    });
    DissipativityResult res;
    auto idx = index_window(IndexDomain::Integers, k_range);
    std::vector<double> terms;
    for (long k : idx) {
        long d = std::labs(k);
        double s = 0.0;
        for (long m = -horizon; m <= horizon; ++m) {
            // H^2(mu_{m+k}, mu_m) with k < 0 equals H^2(mu_{(m+k)+d}, mu_{m+k})
            long base = k >= 0 ? m : m + k;
            s += h2[static_cast<std::size_t>(d)][static_cast<std::size_t>(base + horizon + d)];
        }
        res.norm_sq.push_back(2.0 * s);
        terms.push_back(std::exp(-s));
    }
    if (!witness) witness = limit_witness(fam);
    SeriesOptions so;
    so.horizon = k_range;
    so.two_sided = true;
    so.threshold_diverge = threshold_diverge;
    if (witness) {
        if (!(witness->slope > 0.0)) throw DomainError("dissipativity witness needs a positive slope");
        double r = std::exp(-witness->slope / 2.0);
        double C = std::exp(witness->slope * static_cast<double>(witness->k0) / 2.0);
        so.envelope = TermEnvelope::geometric(C, r, 0);
        res.witness = witness;
        res.heuristic = false;
    }
    res.series = make_series("dissipativity(" + fam.name() + ")", std::move(idx), std::move(terms), so);
    return res;
}

BridgeResult hellinger_bridge(const BernoulliFamily& fam, long depth, long window, double tol) {
    if (depth < 1 || window < depth) throw DomainError("bridge needs 1 <= depth <= window");
    Cache c(fam, -window, window);
    const std::size_t W = static_cast<std::size_t>(window);
    std::vector<double> h(W * W);  // h[(|n|-1) * W + (m-1)]
    parallel_for(W, [&](std::size_t a) {
        for (std::size_t b = 0; b < W; ++b)
            h[a * W + b] = std::sqrt(hellinger_sq(c[-static_cast<long>(a) - 1], c[static_cast<long>(b) + 1]));
    });
    BridgeResult r;
    for (long k = 1; k <= depth; ++k) {
        double best = INFINITY;
        long bn = 0, bm = 0;
        for (std::size_t a = static_cast<std::size_t>(k) - 1; a < W; ++a)
            for (std::size_t b = static_cast<std::size_t>(k) - 1; b < W; ++b)
                if (h[a * W + b] < best) {
                    best = h[a * W + b];
                    bn = -static_cast<long>(a) - 1;
                    bm = static_cast<long>(b) + 1;
                }
        r.n.push_back(bn);
        r.m.push_back(bm);
        r.distance.push_back(best);
    }
    r.floor = r.distance.back();
    r.found = r.floor <= tol;
    return r;
}

std::vector<AtomSeries> atom_fixed_point_check(const BernoulliFamily& fam, const BernoulliOptions& opt,
                                               const std::map<std::size_t, TermEnvelope>& envelopes) {
    const long N = opt.horizon;
    Cache c(fam, -N, N);
    auto idx = index_window(IndexDomain::Integers, N);
    std::vector<AtomSeries> out;
    for (std::size_t b = 0; b < fam.atom_count(); ++b) {
        std::vector<double> terms;
        for (long n : idx) terms.push_back(std::max(0.0, 1.0 - c[n].mass_at(static_cast<double>(b))));
        BernoulliOptions o = opt;
        if (auto it = envelopes.find(b); it != envelopes.end()) o.envelope = it->second;
        auto so = two_sided(o);
        if (fam.constant_beyond()) {
            long N0 = *fam.constant_beyond();
            bool fixed = fam.at(-N0 - 1).mass_at(static_cast<double>(b)) == 1.0 &&
                         fam.at(N0 + 1).mass_at(static_cast<double>(b)) == 1.0;
            add_limit_envelope(so, fam, 0, fixed);
        }
        out.push_back({b, fam.labels()[b],
                       make_series("atom(" + fam.labels()[b] + ")", idx, std::move(terms), so)});
    }
    return out;
}

CertificateSeries conservative_core_check(const BernoulliFamily& fam, const std::vector<std::size_t>& core,
                                          const BernoulliOptions& opt) {
    if (core.empty()) throw DomainError("conservative core must be nonempty");
    for (std::size_t b : core)
        if (b >= fam.atom_count()) throw DomainError("core atom outside the base space");
    const long N = opt.horizon;
    Cache c(fam, -N, N);
    auto outside = [&](const DiscreteMeasure& mu) {
        double in = 0.0;
        for (std::size_t b : core) in += mu.mass_at(static_cast<double>(b));
        return std::max(0.0, mu.total_mass() - in);
    };
    auto idx = index_window(IndexDomain::Integers, N);
    std::vector<double> terms;
    for (long n : idx) terms.push_back(outside(c[n]));
    auto so = two_sided(opt);
    if (fam.constant_beyond()) {
        long N0 = *fam.constant_beyond();
        add_limit_envelope(so, fam, 0, outside(fam.at(-N0 - 1)) == 0.0 && outside(fam.at(N0 + 1)) == 0.0);
    }
    return make_series("conservative_core(" + fam.name() + ")", std::move(idx), std::move(terms), so);
}

CertificateSeries type_II1_check(const BernoulliFamily& fam, const DiscreteMeasure& nu, const BernoulliOptions& opt) {
    if (!nu.is_probability()) throw DomainError("type II1 check needs a probability nu");
    DiscreteMeasure mu0 = fam.at(0);
    auto al = align(mu0, nu);
    for (std::size_t i = 0; i < al.pos.size(); ++i)
        if ((al.a[i] > 0.0) != (al.b[i] > 0.0)) throw DomainError("nu is not equivalent to mu_0");
    const long N = opt.horizon;
    Cache c(fam, -N, N);
    auto idx = index_window(IndexDomain::Integers, N);
    std::vector<double> terms;
    for (long n : idx) terms.push_back(hellinger_sq(c[n], nu));
    auto so = two_sided(opt);
    if (fam.constant_beyond()) {
        long N0 = *fam.constant_beyond();
        add_limit_envelope(so, fam, 0,
                           hellinger_sq(fam.at(-N0 - 1), nu) <= 1e-15 && hellinger_sq(fam.at(N0 + 1), nu) <= 1e-15);
    }
    return make_series("type_II1(" + fam.name() + ")", std::move(idx), std::move(terms), so);
}

TypeIIinfResult type_IIinf_check(const BernoulliFamily& fam, const SigmaFiniteMeasure& nu, const ExhaustionSets& U,
                                 const BernoulliOptions& opt, std::optional<TermEnvelope> outside_envelope,
                                 std::optional<TermEnvelope> hellinger_envelope) {
    if (nu.weights.size() != fam.atom_count()) throw DomainError("nu must weight every materialized atom");
    for (double w : nu.weights)
        if (!(w > 0.0)) throw DomainError("nu must charge every atom");
    if (nu.infinite_tail && !(nu.tail_floor > 0.0)) throw DomainError("infinite tail needs a positive weight floor");
    const long N = opt.horizon;
    Cache c(fam, -N, N);
    auto idx = index_window(IndexDomain::Integers, N);
    std::vector<double> t1, t2, t3;
    for (long n : idx) {
        auto set = U(n);
        if (set.empty()) throw DomainError("exhaustion set U_n is empty at n=" + std::to_string(n));
        std::vector<char> in(fam.atom_count(), 0);
        for (std::size_t b : set) {
            if (b >= fam.atom_count()) throw DomainError("exhaustion set leaves the base space");
            in[b] = 1;
        }
        const DiscreteMeasure& mu = c[n];
        double out_mass = 0.0, nu_in = 0.0, nu_out = 0.0;
        std::vector<Atom> nu_u;
        for (std::size_t b = 0; b < fam.atom_count(); ++b) {
            if (in[b]) {
                nu_in += nu.weights[b];
                nu_u.push_back({static_cast<double>(b), nu.weights[b]});
            } else {
                out_mass += mu.mass_at(static_cast<double>(b));
                nu_out += nu.weights[b];
            }
        }
        t1.push_back(out_mass);
        t2.push_back(hellinger_sq(mu, scale_mass(DiscreteMeasure(nu_u), 1.0 / nu_in)));
        t3.push_back(nu_out + (nu.infinite_tail ? nu.tail_floor : 0.0));
    }
    BernoulliOptions o1 = opt, o2 = opt, o3 = opt;
    o1.envelope = outside_envelope;
    o2.envelope = hellinger_envelope;
    o3.envelope.reset();
    TypeIIinfResult r;
    r.outside_mass = make_series("outside_mass", idx, std::move(t1), two_sided(o1));
    r.hellinger = make_series("hellinger_to_nu", idx, std::move(t2), two_sided(o2));
    auto so3 = two_sided(o3);
    if (nu.infinite_tail) {
        so3.term_floor = nu.tail_floor;
        so3.floor_reason = "infinitely many atoms outside every U_n carry weight >= " + fmt(nu.tail_floor);
    }
    r.nu_outside = make_series("nu_outside", idx, std::move(t3), so3);
    r.type_IIinf = r.outside_mass.verdict == Verdict::CertifiedConvergent &&
                   r.hellinger.verdict == Verdict::CertifiedConvergent &&
                   r.nu_outside.verdict == Verdict::CertifiedDivergent;
    return r;
}

const char* structure_case_name(StructureCase c) {
    switch (c) {
        case StructureCase::AtomicFixedPoint: return "atomic_fixed_point";
        case StructureCase::Dissipative: return "dissipative";
        case StructureCase::ConservativeCore: return "conservative_core";
    }
    return "conservative_core";
}

StructureReport structure_report(const BernoulliFamily& fam, const BernoulliOptions& opt, const StructureHints& hints) {
    StructureReport rep;
    auto atoms = atom_fixed_point_check(fam, opt, hints.atom_envelopes);
    const AtomSeries* best = nullptr;
    for (const auto& a : atoms)
        if (a.series.verdict == Verdict::CertifiedConvergent &&
            (!best || a.series.total_upper() < best->series.total_upper()))
            best = &a;
    if (best) {
        rep.kind = StructureCase::AtomicFixedPoint;
        rep.certified = true;
        rep.atom = best->atom;
        rep.evidence = best->series;
        rep.reasoning = "sum of 1 - mu_n({" + best->label + "}) is certified finite";
        return rep;
    }
    for (const auto& a : atoms)
        if (empirically_convergent(a.series) && (!best || a.series.partial_total() < best->series.partial_total()))
            best = &a;

    const long K = hints.k_range > 0 ? hints.k_range : opt.horizon;
    auto dis = dissipativity_certificate(fam, K, opt.horizon, hints.witness, opt.threshold_diverge);
    if (dis.series.verdict == Verdict::CertifiedConvergent) {
        rep.kind = StructureCase::Dissipative;
        rep.certified = true;
        rep.evidence = dis.series;
        rep.reasoning = "sum of exp(-||c_k||^2/2) certified finite (" + dis.witness->source + ")";
        return rep;
    }
    if (best) {
        rep.kind = StructureCase::AtomicFixedPoint;
        rep.atom = best->atom;
        rep.evidence = best->series;
        rep.reasoning = "atom series for " + best->label + " looks convergent on the window (no tail envelope)";
        return rep;
    }
    if (empirically_convergent(dis.series)) {
        rep.kind = StructureCase::Dissipative;
        rep.evidence = dis.series;
        rep.reasoning = "dissipativity terms decay on the window (no growth witness)";
        return rep;
    }

    // Greedy core: drop atoms whose window mass is a vanishing share of the window length.
    const long N = opt.horizon;
    Cache c(fam, -N, N);
    const double cut = hints.retention_fraction * static_cast<double>(2 * N + 1);
    for (std::size_t b = 0; b < fam.atom_count(); ++b) {
        double s = 0.0;
        for (long n = -N; n <= N; ++n) s += c[n].mass_at(static_cast<double>(b));
        if (s > cut) rep.core.push_back(b);
    }
    if (rep.core.empty()) throw DomainError("no atom retains enough mass to form a conservative core");
    BernoulliOptions o = opt;
    o.envelope = hints.core_envelope;
    rep.kind = StructureCase::ConservativeCore;
    rep.evidence = conservative_core_check(fam, rep.core, o);
    rep.certified = rep.evidence.verdict == Verdict::CertifiedConvergent;
    rep.reasoning = rep.certified ? "mass outside the core is certified summable"
                                  : "core mass retained on the window; summability outside the core not certified";
    return rep;
}

}  // namespace flowlab
