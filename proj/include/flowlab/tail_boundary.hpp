#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "flowlab/certificate.hpp"
#include "flowlab/measure.hpp"
#include "flowlab/metrics.hpp"

namespace flowlab {

struct TailOptions {
    long horizon = 100;
    double threshold_diverge = kDefaultDivergeThreshold;
    std::optional<TermEnvelope> envelope;
};

// term(n) = 1 - |mu_n^(omega)|. Uses the sequence's closed-form transform when it has one.
CertificateSeries eigenvalue_certificate(const MeasureSequence& seq, double omega, const TailOptions& opt);

// beta_n <= mu_n picked out of mu_n.
using Extractor = std::function<DiscreteMeasure(long n, const DiscreteMeasure& mu)>;

// Restriction to I, scaled down when its mass exceeds mass_cap.
Extractor interval_extractor(Interval I, double mass_cap = std::numeric_limits<double>::infinity());

// term(n) = beta_n(R) Var(beta_n / beta_n(R)), zero when beta_n vanishes. Every beta_n must be
// dominated by mu_n and have support width <= width_cap, else ExtractionError. A divergent
// score means the flow is periodic; a convergent one says nothing.
CertificateSeries periodicity_score(const MeasureSequence& seq, const Extractor& extract, double width_cap,
                                    const TailOptions& opt);

// Median of the block means, averaging the two middle values for even counts.
double middle_point(std::vector<double> values);

struct BlockConcentration {
    double middle;
    double term;  // sum_n p q int (x - t)^2 dbeta_n
};

// Core computation for one block of probability measures beta_n.
BlockConcentration concentrate_block(const std::vector<DiscreteMeasure>& betas, double p, double q);

struct ConcentrationBlock {
    std::vector<long> indices;
    Interval interval;
    double p;
    double q;
};

struct ConcentrationResult {
    std::vector<double> middle_points;
    CertificateSeries series;
};

// beta_n = mu_n restricted to I_k and normalized. Checks I_k avoids (-1, 1), |I_k| <= width_cap
// and p delta_0 + q beta_n <= mu_n.
ConcentrationResult concentration_points(const MeasureSequence& seq, const std::vector<ConcentrationBlock>& blocks,
                                         double width_cap, const TailOptions& opt);

enum class EquivMetric { Hellinger, TotalVariation, W2Cutoff };

CertificateSeries equivalence_certificate(const MeasureSequence& a, const MeasureSequence& b, EquivMetric metric,
                                          double kappa, const TailOptions& opt,
                                          std::size_t lp_limit = kDefaultLpLimit);

struct WalkResult {
    long horizon = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;
    double variance = 0.0;
    double expected_mean = 0.0;
    double expected_variance = 0.0;
    double z_score = 0.0;
    long block_size = 0;
    std::vector<double> block_means;  // empirical mean of each block sum
    std::vector<double> sums;         // S_N per sample, in sample order
};

// Monte Carlo of S_N = X_1 + ... + X_N with independent X_n ~ mu_n. Sample i draws from its own
// generator seeded by (seed, i), one draw per index, so results do not depend on threading.
WalkResult simulate_walk(const MeasureSequence& seq, long horizon, long samples, std::uint64_t seed,
                         long block_size = 0);

}  // namespace flowlab
