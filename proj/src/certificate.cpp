#include "flowlab/certificate.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "flowlab/errors.hpp"

namespace flowlab {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::CertifiedConvergent: return "certified_convergent";
        case Verdict::CertifiedDivergent: return "certified_divergent";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

TermEnvelope TermEnvelope::zero(long from) { return {Kind::Zero, 0.0, 0.0, from}; }

TermEnvelope TermEnvelope::power(double C, double p, long from) {
    if (!(C >= 0.0) || !(p > 1.0)) throw DomainError("power envelope needs C >= 0 and p > 1");
    return {Kind::Power, C, p, std::max(from, 1L)};
}

TermEnvelope TermEnvelope::geometric(double C, double r, long from) {
    if (!(C >= 0.0) || !(r >= 0.0 && r < 1.0)) throw DomainError("geometric envelope needs C >= 0 and 0 <= r < 1");
    return {Kind::Geometric, C, r, from};
}

double TermEnvelope::at(long abs_n) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Power: return C * std::pow(static_cast<double>(abs_n), -rate);
        case Kind::Geometric: return C * std::pow(rate, static_cast<double>(abs_n));
    }
    return 0.0;
}

double TermEnvelope::tail_after(long N, bool two_sided) const {
    if (N + 1 < from) throw DomainError("envelope does not cover the tail beyond the horizon");
    double one = 0.0;
    switch (kind) {
        case Kind::Zero: one = 0.0; break;
        case Kind::Power: {
            // sum_{n > N} n^-p <= int_N^inf x^-p dx for N >= 1
            double base = static_cast<double>(std::max(N, 1L));
            one = C * std::pow(base, 1.0 - rate) / (rate - 1.0);
            break;
        }
        case Kind::Geometric: one = C * std::pow(rate, static_cast<double>(N + 1)) / (1.0 - rate); break;
    }
    return two_sided ? 2.0 * one : one;
}

std::string TermEnvelope::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case Kind::Zero: os << "term = 0"; break;
        case Kind::Power: os << "term <= " << C << " |n|^-" << rate; break;
        case Kind::Geometric: os << "term <= " << C << " * " << rate << "^|n|"; break;
    }
    os << " for |n| >= " << from;
    return os.str();
}

CertificateSeries make_series(std::string name, std::vector<long> indices, std::vector<double> terms,
                              const SeriesOptions& opt) {
    if (indices.size() != terms.size()) throw InternalError("series indices and terms differ in length");
    CertificateSeries s;
    s.name = std::move(name);
    s.indices = std::move(indices);
    s.terms = std::move(terms);
    s.partial.reserve(s.terms.size());
    double acc = 0.0;
    for (double t : s.terms) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw InternalError("series term is negative or not finite");
        acc += t;
        s.partial.push_back(acc);
    }

    if (opt.envelope) {
        const auto& env = *opt.envelope;
        for (std::size_t i = 0; i < s.terms.size(); ++i) {
            long an = std::labs(s.indices[i]);
            if (an < env.from) continue;
            double bound = env.at(an);
            if (s.terms[i] > bound * (1.0 + 1e-9) + opt.envelope_slack) {
                std::ostringstream os;
                os.precision(17);
                os << s.name << ": term " << s.terms[i] << " at n=" << s.indices[i] << " exceeds envelope "
                   << env.describe();
                if (opt.envelope_from_theorem) throw BoundViolation(os.str());
                throw DomainError(os.str());
            }
        }
        if (opt.horizon + 1 >= env.from) {
            s.tail_bound = env.tail_after(opt.horizon, opt.two_sided);
            s.verdict = Verdict::CertifiedConvergent;
            s.witness = "tail envelope: " + env.describe();
            return s;
        }
    }

    if (opt.term_floor && *opt.term_floor > 0.0) {
        bool ok = true;
        for (double t : s.terms) ok = ok && t >= *opt.term_floor;
        if (ok) {
            std::ostringstream os;
            os.precision(17);
            os << "every term >= " << *opt.term_floor;
            if (!opt.floor_reason.empty()) os << " (" << opt.floor_reason << ")";
            s.verdict = Verdict::CertifiedDivergent;
            s.witness = os.str();
            return s;
        }
    }

    const std::size_t N = s.partial.size();
    if (N >= 4 && acc > opt.threshold_diverge) {
        auto P = [&](std::size_t k) { return k == 0 ? 0.0 : s.partial[k - 1]; };
        double late = P(N) - P(N / 2), early = P(N / 2) - P(N / 4);
        if (late > 0.0 && late >= early * (1.0 - 1e-12)) {
            std::ostringstream os;
            os.precision(17);
            os << "partial sum " << acc << " > " << opt.threshold_diverge << " with nondecreasing dyadic increments";
            s.verdict = Verdict::CertifiedDivergent;
            s.witness = os.str();
            return s;
        }
    }
    s.verdict = Verdict::Inconclusive;
    s.witness = "no tail envelope and no divergence witness";
    return s;
}

}  // namespace flowlab
