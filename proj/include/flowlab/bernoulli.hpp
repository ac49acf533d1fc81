#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowlab/certificate.hpp"
#include "flowlab/measure.hpp"

namespace flowlab {

// Z-indexed family of probability measures on a countable base space. The base space is
// materialized as atom labels; label i sits at position i. With constant_beyond = N0 the
// family is mu_n = mu_{sign(n)(N0+1)} for |n| > N0, which is enforced by at().
class BernoulliFamily {
public:
    using Generator = std::function<DiscreteMeasure(long)>;

    BernoulliFamily() = default;
    BernoulliFamily(std::vector<std::string> labels, Generator gen, std::string name,
                    std::optional<long> constant_beyond = std::nullopt);

    DiscreteMeasure at(long n) const;
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t atom_count() const { return labels_.size(); }
    const std::string& name() const { return name_; }
    std::optional<long> constant_beyond() const { return constant_beyond_; }
    std::size_t label_index(const std::string& label) const;

private:
    std::vector<std::string> labels_;
    Generator gen_;
    std::string name_;
    std::optional<long> constant_beyond_;
};

struct BernoulliOptions {
    long horizon = 100;
    double threshold_diverge = kDefaultDivergeThreshold;
    std::optional<TermEnvelope> envelope;
};

// term(h) = H^2(mu_{g+h}, mu_h) for |h| <= horizon. Summable iff the shift by g is
// nonsingular.
CertificateSeries kakutani_check(const BernoulliFamily& fam, long g, const BernoulliOptions& opt);

// term(m) = 2 H^2(mu_{m+k}, mu_m); the total is ||c_k||^2.
CertificateSeries cocycle_norm(const BernoulliFamily& fam, long k, const BernoulliOptions& opt);

// The same window sum computed for -k over the shifted window, equal to cocycle_norm(k) by reindexing.
double cocycle_norm_reindexed(const BernoulliFamily& fam, long k, long horizon);

// Claim ||c_k||^2 >= slope (|k| - k0) for every k.
struct DissipativityWitness {
    double slope;
    long k0;
    std::string source;
};

// Derived from constant_beyond when the two limits differ: slope = 2 H^2(limits), k0 = 2 N0 + 1.
std::optional<DissipativityWitness> limit_witness(const BernoulliFamily& fam);

struct DissipativityResult {
    CertificateSeries series;    // exp(-||c_k||^2 / 2), |k| <= k_range
    std::vector<double> norm_sq; // window norms, same order as series.indices
    std::optional<DissipativityWitness> witness;
    bool heuristic = true;
};

DissipativityResult dissipativity_certificate(const BernoulliFamily& fam, long k_range, long horizon,
                                              std::optional<DissipativityWitness> witness = std::nullopt,
                                              double threshold_diverge = kDefaultDivergeThreshold);

struct BridgeResult {
    std::vector<long> n;
    std::vector<long> m;
    std::vector<double> distance;  // H(mu_n, mu_m), not squared
    bool found = false;
    double floor = 0.0;  // smallest distance reached at the last depth
};

// For k = 1..depth, the pair n <= -k, m >= k (|n|, |m| <= window) minimizing H(mu_n, mu_m).
BridgeResult hellinger_bridge(const BernoulliFamily& fam, long depth, long window, double tol = 1e-6);

struct AtomSeries {
    std::size_t atom;
    std::string label;
    CertificateSeries series;
};

// sum_n (1 - mu_n({b})) per atom b. envelopes maps atom index to a tail envelope.
std::vector<AtomSeries> atom_fixed_point_check(const BernoulliFamily& fam, const BernoulliOptions& opt,
                                               const std::map<std::size_t, TermEnvelope>& envelopes = {});

// sum_n mu_n(X_0 \ C_0). Empty core throws DomainError.
CertificateSeries conservative_core_check(const BernoulliFamily& fam, const std::vector<std::size_t>& core,
                                          const BernoulliOptions& opt);

// sum_n H^2(mu_n, nu) for a probability nu equivalent to mu_0.
CertificateSeries type_II1_check(const BernoulliFamily& fam, const DiscreteMeasure& nu, const BernoulliOptions& opt);

// Weights on the materialized atoms. With infinite_tail, infinitely many further atoms carry
// weight >= tail_floor each.
struct SigmaFiniteMeasure {
    std::vector<double> weights;
    bool infinite_tail = false;
    double tail_floor = 0.0;
};

using ExhaustionSets = std::function<std::vector<std::size_t>(long)>;

struct TypeIIinfResult {
    CertificateSeries outside_mass;  // mu_n(X_0 \ U_n)
    CertificateSeries hellinger;     // H^2(mu_n, nu|U_n / nu(U_n))
    CertificateSeries nu_outside;    // nu(X_0 \ U_n), window part plus the tail floor
    bool type_IIinf = false;
};

TypeIIinfResult type_IIinf_check(const BernoulliFamily& fam, const SigmaFiniteMeasure& nu, const ExhaustionSets& U,
                                 const BernoulliOptions& opt, std::optional<TermEnvelope> outside_envelope = std::nullopt,
                                 std::optional<TermEnvelope> hellinger_envelope = std::nullopt);

enum class StructureCase { AtomicFixedPoint, Dissipative, ConservativeCore };

const char* structure_case_name(StructureCase c);

struct StructureHints {
    std::map<std::size_t, TermEnvelope> atom_envelopes;
    std::optional<DissipativityWitness> witness;
    std::optional<TermEnvelope> core_envelope;
    long k_range = 0;  // 0: same as the horizon
    double retention_fraction = 0.01;
};

struct StructureReport {
    StructureCase kind = StructureCase::ConservativeCore;
    bool certified = false;
    std::optional<std::size_t> atom;
    std::vector<std::size_t> core;
    CertificateSeries evidence;
    std::string reasoning;
};

StructureReport structure_report(const BernoulliFamily& fam, const BernoulliOptions& opt,
                                 const StructureHints& hints = {});

}  // namespace flowlab
