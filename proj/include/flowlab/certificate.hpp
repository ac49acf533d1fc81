#pragma once

#include <optional>
#include <string>
#include <vector>

namespace flowlab {

inline constexpr double kDefaultDivergeThreshold = 1e3;

enum class Verdict { CertifiedConvergent, CertifiedDivergent, Inconclusive };

const char* verdict_name(Verdict v);

// Analytic majorant claimed for term(n) whenever |n| >= from. Checked against every
// computed term before it is trusted for the tail.
struct TermEnvelope {
    enum class Kind { Zero, Power, Geometric };
    Kind kind = Kind::Zero;
    double C = 0.0;
    double rate = 0.0;  // exponent p for Power (term <= C |n|^-p), ratio r for Geometric (term <= C r^|n|)
    long from = 0;

    static TermEnvelope zero(long from = 0);
    static TermEnvelope power(double C, double p, long from = 1);
    static TermEnvelope geometric(double C, double r, long from = 0);

    double at(long abs_n) const;
    // Bound on sum_{|n| > N} term(n). Requires N + 1 >= from.
    double tail_after(long N, bool two_sided) const;
    std::string describe() const;
};

struct SeriesOptions {
    long horizon = 0;
    bool two_sided = false;
    double threshold_diverge = kDefaultDivergeThreshold;
    std::optional<TermEnvelope> envelope;
    // Lower bound c > 0 valid for every term of the infinite series.
    std::optional<double> term_floor;
    std::string floor_reason;
    // Envelope produced by a proof inside the library (a failed check is then a bound violation).
    bool envelope_from_theorem = false;
    double envelope_slack = 1e-12;
};

struct CertificateSeries {
    std::string name;
    std::vector<long> indices;
    std::vector<double> terms;
    std::vector<double> partial;
    std::optional<double> tail_bound;
    Verdict verdict = Verdict::Inconclusive;
    std::string witness;

    double partial_total() const { return partial.empty() ? 0.0 : partial.back(); }
    // partial sum plus tail when certified convergent, otherwise the partial sum.
    double total_upper() const { return partial_total() + tail_bound.value_or(0.0); }
};

// Builds prefix sums and decides the verdict. Convergence needs an envelope covering the
// tail; divergence needs a term floor or a partial sum past the threshold whose dyadic block
// increments are nondecreasing.
CertificateSeries make_series(std::string name, std::vector<long> indices, std::vector<double> terms,
                              const SeriesOptions& opt);

}  // namespace flowlab
