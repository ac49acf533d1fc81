#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowlab/certificate.hpp"
#include "flowlab/measure.hpp"

namespace flowlab {

struct PoissonFlowEntry {
    double lambda;
    double b;
};

// Product over entries of exp(lambda_k delta_{b_k}).
struct PoissonFlowSpec {
    std::vector<PoissonFlowEntry> entries;
    bool positive_type = true;

    void validate() const;
};

struct ITPFI2Entry {
    double b;
    long M;
};

// Product over entries of gamma(b_k)^{*M_k}.
struct ITPFI2Spec {
    std::vector<ITPFI2Entry> entries;

    void validate() const;
};

struct PipelineOptions {
    double eps_trunc = kDefaultTruncation;
    double threshold_diverge = kDefaultDivergeThreshold;
    // Majorant for terms beyond the supplied entries when they are the prefix of a longer spec.
    // Unset: the entries are the whole spec and the tail is 0.
    std::optional<TermEnvelope> tail;
};

// One certificate entry: the exact quantity next to the bound it must respect.
struct CheckedTerm {
    double exact;
    double bound;
};

struct ItpfiToPoissonResult {
    PoissonFlowSpec spec;
    std::vector<CheckedTerm> checks;
    CertificateSeries prokhorov;
};

// lambda = M e^-b / (1 + e^-b); term = exact TV(gamma(b)^{*M}, exp(lambda delta_b)) <= 4 e^-b.
ItpfiToPoissonResult itpfi2_to_poisson(const ITPFI2Spec& spec, const PipelineOptions& opt = {});

struct SliceReport {
    long k;
    double lambda;
    double b;
    double lambda_prime;
    long M;
    double intensity_gap;  // |M lambda' - lambda|
    double concentration;  // int (x - b)^2 dzeta_k
    std::optional<double> w2_sq_exact;
    CheckedTerm lipschitz;
    CheckedTerm prokhorov;
};

struct PoissonToItpfiResult {
    ITPFI2Spec spec;
    std::vector<SliceReport> slices;
    DiscreteMeasure discarded;  // the (0, 1] slice
    CertificateSeries concentration;
    CertificateSeries lipschitz;
    CertificateSeries prokhorov;
};

// Intensities must live on (0, inf). Slices (k, k+1] are aggregated into zeta_k; the first slice
// is reported and dropped.
PoissonToItpfiResult poisson_to_itpfi2(const std::vector<DiscreteMeasure>& intensities,
                                       const PipelineOptions& opt = {});

struct TwoPointBucket {
    long k;
    std::vector<std::size_t> members;
    double lambda;
    double b;
    double w2_term;        // sum p (b - d)^2
    double lecam_sup;      // lambda^-1 sum p^2, sup-norm normalization
    double lecam_l1;       // twice the above, the l1 normalization used for TV here
    double majorant;       // 2C / (|k| - 1)^2, sup-norm normalization
    std::optional<double> tv_exact;
};

struct TwoPointToPoissonResult {
    PoissonFlowSpec spec;
    std::vector<double> translations;  // shift applied to each input, heavier atom to 0
    std::vector<TwoPointBucket> buckets;
    std::vector<std::size_t> discarded;  // members of buckets -1, 0, 1
    double discarded_variance = 0.0;
    CertificateSeries wasserstein;
    CertificateSeries lecam;
};

// Inputs: two-atom probability measures with variance <= variance_cap.
TwoPointToPoissonResult two_point_to_poisson(const std::vector<DiscreteMeasure>& family, double variance_cap,
                                             const PipelineOptions& opt = {});

struct TwoPointFamilyEntry {
    long copies;
    DiscreteMeasure eta;
};

struct PoissonToTwoPointResult {
    std::vector<TwoPointFamilyEntry> family;
    std::vector<CheckedTerm> checks;  // exact TV against 4 lambda / M (exact omitted when M is huge)
    CertificateSeries prokhorov;
    double sup_variance = 0.0;
};

// Mass cap eps_k = cap_ratio^k for the k-th entry (1-based); M_k = ceil(lambda_k / eps_k).
PoissonToTwoPointResult poisson_to_two_point(const PoissonFlowSpec& spec, double cap_ratio = 0.5,
                                             const PipelineOptions& opt = {});

struct AlmostPeriodicTarget {
    std::vector<double> thetas;  // character enumeration, thetas[0] == 0
    MeasureSequence seeds;       // probability measures on Z, indexed by naturals
    // Majorant on 1 - |eta_m^(omega)|^2, uniform in omega. Without one the infinite product is
    // estimated from the materialized seeds only and the result is flagged.
    std::optional<TermEnvelope> seed_envelope;
    std::string provenance;
};

// Dense-rotation target with seeds (1 - 2^-n) delta_0 + 2^-n delta_1 and characters
// 0, theta, -theta, 2 theta, -2 theta, ... (mod 1).
AlmostPeriodicTarget stock_rotation_target(double theta, std::size_t characters);

struct AlmostPeriodicOptions {
    long depth = 8;
    long translation_budget = 1'000'000;
    long seed_horizon = 2048;
};

struct AlmostPeriodicBlock {
    long k;
    long n_begin;  // first seed index of the block
    long n_end;    // last seed index of the block
    long translation;
    double min_block_transform;  // min over F_k of alpha_k^(omega)
    DiscreteMeasure gamma;
};

struct AlmostPeriodicResult {
    std::vector<AlmostPeriodicBlock> blocks;
    PoissonFlowSpec spec;
    std::vector<CertificateSeries> eigenvalues;  // one per character
    bool certified_contraction = false;
};

AlmostPeriodicResult almost_periodic_pipeline(const AlmostPeriodicTarget& target, const AlmostPeriodicOptions& opt);

struct SplitResult {
    PoissonFlowSpec spec;
    std::vector<double> tv_check;  // TV(exp(lambda/L delta_b)^{*L}, exp(lambda delta_b)) per entry
    std::vector<double> defect_budget;
};

SplitResult split_divisible(const PoissonFlowSpec& spec, long L, double eps_trunc = kDefaultTruncation);

struct BinomialCheck {
    long K;
    long M;
    double tv_exact;
    double bound;  // 4 sqrt(beta), l1
};

// (rho)^{*L} against (rho_hat)^{*K} * (gamma)^{*M} with rho = (1+a+b)^-1 (delta_0 + aP + bQ).
BinomialCheck binomial_approx_check(double alpha, double beta, const DiscreteMeasure& P, const DiscreteMeasure& Q,
                                    long L);

struct ReduceOptions {
    // Concentrate the first bucket [0, 1) at its middle point instead of moving it to 0.
    bool concentrate_first_bucket = false;
    double threshold_diverge = kDefaultDivergeThreshold;
};

struct ReducedGroup {
    std::vector<double> b;  // nondecreasing
    long count;             // L_theta
    long K;
    long M;
    std::optional<BinomialCheck> split;  // absent for one-coordinate states
};

struct ItpfiReduceResult {
    std::vector<std::vector<double>> b_per_state;
    std::vector<double> distinct_b;
    std::vector<ReducedGroup> groups;
    std::vector<std::pair<std::vector<double>, long>> rho_part;  // rho(b_hat)^{*K}
    ITPFI2Spec gamma_part;
    CertificateSeries concentration;
    CertificateSeries wasserstein;
    CertificateSeries hellinger;
    CertificateSeries split;
};

ItpfiReduceResult itpfi_bounded_reduce(const std::vector<std::vector<double>>& a, const ReduceOptions& opt = {});

}  // namespace flowlab
