#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace flowlab {

inline constexpr double kDefaultTruncation = 1e-12;
inline constexpr double kMergeRelTol = 1e-12;
inline constexpr double kProbabilityTol = 1e-9;

// Two positions are the same atom when they agree to kMergeRelTol * max(1, |x|).
bool same_position(double a, double b);

struct Atom {
    double pos;
    double mass;
};

// Finite positive combination of point masses on the line. Atoms are kept sorted by
// position with strictly positive masses. `defect` is mass lost to truncation; it has no
// location and every bound that consumes the measure accounts for it separately.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    explicit DiscreteMeasure(std::vector<Atom> atoms, double defect = 0.0);

    static DiscreteMeasure dirac(double x, double mass = 1.0);
    static DiscreteMeasure zero() { return DiscreteMeasure(); }

    const std::vector<Atom>& atoms() const { return atoms_; }
    double defect() const { return defect_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    double total_mass() const;  // atoms only
    double mass_at(double x) const;
    std::vector<double> positions() const;
    std::vector<double> masses() const;
    double min_pos() const;
    double max_pos() const;
    double width() const { return empty() ? 0.0 : max_pos() - min_pos(); }

    // total_mass + defect == 1 within tol.
    bool is_probability(double tol = kProbabilityTol) const;

    // Atom-wise domination: every atom of *this is an atom of other with no larger mass.
    bool dominated_by(const DiscreteMeasure& other, double tol = 1e-12) const;

    bool operator==(const DiscreteMeasure& o) const;

private:
    std::vector<Atom> atoms_;
    double defect_ = 0.0;
};

struct Interval {
    double lo;
    double hi;
    bool lo_closed = true;
    bool hi_closed = false;

    bool contains(double x) const;
    double length() const { return hi - lo; }
};

DiscreteMeasure translate(const DiscreteMeasure& mu, double t);
DiscreteMeasure scale_mass(const DiscreteMeasure& mu, double c);
DiscreteMeasure restrict(const DiscreteMeasure& mu, const Interval& I);
DiscreteMeasure mix(const std::vector<DiscreteMeasure>& parts, const std::vector<double>& weights);
DiscreteMeasure add(const DiscreteMeasure& a, const DiscreteMeasure& b);
// Mass-normalized copy (defect scaled alongside). Zero mass throws DomainError.
DiscreteMeasure normalize(const DiscreteMeasure& mu);

DiscreteMeasure convolve(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
DiscreteMeasure convolve_all(const std::vector<DiscreteMeasure>& parts);
DiscreteMeasure convolve_power(const DiscreteMeasure& mu, long k);
// Reflection x -> -x.
DiscreteMeasure reflect(const DiscreteMeasure& mu);

struct Moments {
    double mass;
    double mean;      // of the normalized measure
    double variance;  // of the normalized measure
};

Moments moments(const DiscreteMeasure& mu);
// Integral of (x - t)^2 against mu (unnormalized).
double second_moment_about(const DiscreteMeasure& mu, double t);

std::complex<double> char_fn(const DiscreteMeasure& mu, double omega);

// Poisson-type exponential exp(mu) = e^{-m} sum_k mu^{*k}/k!, cut off at the first K whose
// Poisson(m) tail is below eps. The tail mass becomes the defect.
DiscreteMeasure compound_poisson(const DiscreteMeasure& intensity, double eps = kDefaultTruncation);
// Closed-form characteristic function of exp(intensity), no truncation involved.
std::complex<double> compound_poisson_char_fn(const DiscreteMeasure& intensity, double omega);

DiscreteMeasure standard_poisson(double lambda, double a, double eps = kDefaultTruncation);
DiscreteMeasure two_point_gamma(double a);
DiscreteMeasure rho_state(const std::vector<double>& a);

// Poisson(lambda) probability mass at k and upper tail P(N > k).
double poisson_pmf(double lambda, long k);
double poisson_tail(double lambda, long k);

enum class IndexDomain { Naturals, Integers };

// Index -> measure map. Naturals start at 1. Window iteration on the integers visits
// 0, -1, 1, -2, 2, ... so prefix sums are symmetric window sums.
class MeasureSequence {
public:
    using Generator = std::function<DiscreteMeasure(long)>;
    using CharFn = std::function<std::complex<double>(long, double)>;

    MeasureSequence() = default;
    MeasureSequence(IndexDomain domain, Generator gen, std::string label, CharFn cf = {});

    DiscreteMeasure at(long n) const;
    std::complex<double> char_fn(long n, double omega) const;
    bool has_closed_char_fn() const { return static_cast<bool>(cf_); }

    IndexDomain domain() const { return domain_; }
    const std::string& label() const { return label_; }
    std::vector<long> window(long horizon) const;

private:
    IndexDomain domain_ = IndexDomain::Naturals;
    Generator gen_;
    std::string label_;
    CharFn cf_;
};

std::vector<long> index_window(IndexDomain domain, long horizon);

}  // namespace flowlab
