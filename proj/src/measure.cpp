#include "flowlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flowlab/errors.hpp"
#include "flowlab/kernels.hpp"

namespace flowlab {

namespace {

constexpr std::size_t kMaxAtoms = 4'000'000;

void canonicalize(std::vector<Atom>& atoms) {
    for (const auto& a : atoms) {
        if (!std::isfinite(a.pos) || !std::isfinite(a.mass))
            throw DomainError("measure atom is not finite");
        if (a.mass < 0.0) throw DomainError("negative atom mass");
    }
    atoms.erase(std::remove_if(atoms.begin(), atoms.end(), [](const Atom& a) { return a.mass == 0.0; }),
                atoms.end());
    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.pos < b.pos; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < atoms.size(); ++r) {
        if (w > 0 && same_position(atoms[w - 1].pos, atoms[r].pos)) {
            atoms[w - 1].mass += atoms[r].mass;
        } else {
            atoms[w++] = atoms[r];
        }
    }
    atoms.resize(w);
}

}  // namespace

bool same_position(double a, double b) {
    return std::abs(a - b) <= kMergeRelTol * std::max({1.0, std::abs(a), std::abs(b)});
}

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms, double defect) : atoms_(std::move(atoms)), defect_(defect) {
    if (!std::isfinite(defect) || defect < 0.0) throw DomainError("defect must be finite and nonnegative");
    canonicalize(atoms_);
}

DiscreteMeasure DiscreteMeasure::dirac(double x, double mass) { return DiscreteMeasure({{x, mass}}); }

double DiscreteMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mass;
    return s;
}

double DiscreteMeasure::mass_at(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x, [](const Atom& a, double v) {
        return a.pos < v && !same_position(a.pos, v);
    });
    if (it != atoms_.end() && same_position(it->pos, x)) return it->mass;
    return 0.0;
}

std::vector<double> DiscreteMeasure::positions() const {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.pos);
    return out;
}

std::vector<double> DiscreteMeasure::masses() const {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.mass);
    return out;
}

double DiscreteMeasure::min_pos() const {
    if (empty()) throw DomainError("empty measure has no support");
    return atoms_.front().pos;
}

double DiscreteMeasure::max_pos() const {
    if (empty()) throw DomainError("empty measure has no support");
    return atoms_.back().pos;
}

bool DiscreteMeasure::is_probability(double tol) const { return std::abs(total_mass() + defect_ - 1.0) <= tol; }

bool DiscreteMeasure::dominated_by(const DiscreteMeasure& other, double tol) const {
    for (const auto& a : atoms_) {
        if (a.mass > other.mass_at(a.pos) + tol) return false;
    }
    return true;
}

bool DiscreteMeasure::operator==(const DiscreteMeasure& o) const {
    if (atoms_.size() != o.atoms_.size() || defect_ != o.defect_) return false;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].pos != o.atoms_[i].pos || atoms_[i].mass != o.atoms_[i].mass) return false;
    }
    return true;
}

bool Interval::contains(double x) const {
    bool lo_ok = lo_closed ? x >= lo : x > lo;
    bool hi_ok = hi_closed ? x <= hi : x < hi;
    return lo_ok && hi_ok;
}

DiscreteMeasure translate(const DiscreteMeasure& mu, double t) {
    std::vector<Atom> atoms = mu.atoms();
    for (auto& a : atoms) a.pos += t;
    return DiscreteMeasure(std::move(atoms), mu.defect());
}

DiscreteMeasure scale_mass(const DiscreteMeasure& mu, double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("scale_mass needs c >= 0");
    std::vector<Atom> atoms = mu.atoms();
    for (auto& a : atoms) a.mass *= c;
    return DiscreteMeasure(std::move(atoms), mu.defect() * c);
}

DiscreteMeasure restrict(const DiscreteMeasure& mu, const Interval& I) {
    std::vector<Atom> atoms;
    for (const auto& a : mu.atoms())
        if (I.contains(a.pos)) atoms.push_back(a);
    // The defect has no location, so all of it may sit inside I.
    return DiscreteMeasure(std::move(atoms), mu.defect());
}

DiscreteMeasure mix(const std::vector<DiscreteMeasure>& parts, const std::vector<double>& weights) {
    if (parts.size() != weights.size()) throw DomainError("mix: parts and weights differ in length");
    std::vector<Atom> atoms;
    double defect = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        double w = weights[i];
        if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("mix: weights must be nonnegative");
        for (const auto& a : parts[i].atoms()) atoms.push_back({a.pos, w * a.mass});
        defect += w * parts[i].defect();
    }
    return DiscreteMeasure(std::move(atoms), defect);
}

DiscreteMeasure add(const DiscreteMeasure& a, const DiscreteMeasure& b) { return mix({a, b}, {1.0, 1.0}); }

DiscreteMeasure normalize(const DiscreteMeasure& mu) {
    double m = mu.total_mass();
    if (!(m > 0.0)) throw DomainError("cannot normalize a measure with zero mass");
    return scale_mass(mu, 1.0 / m);
}

DiscreteMeasure convolve(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    const std::size_t n = mu.size(), k = nu.size();
    double dm = mu.defect(), dn = nu.defect();
    double defect = dm * nu.total_mass() + dn * mu.total_mass() + dm * dn;
    if (n == 0 || k == 0) return DiscreteMeasure({}, defect);
    if (n * k > kMaxAtoms) throw CapacityError("convolution support exceeds atom cap");
    auto x = mu.positions(), mx = mu.masses(), y = nu.positions(), my = nu.masses();
    std::vector<double> pos(n * k), mass(n * k);
    kernels::active().outer_sum_product(x.data(), mx.data(), n, y.data(), my.data(), k, pos.data(), mass.data());
    std::vector<Atom> atoms(n * k);
    for (std::size_t i = 0; i < n * k; ++i) atoms[i] = {pos[i], mass[i]};
    return DiscreteMeasure(std::move(atoms), defect);
}

DiscreteMeasure convolve_all(const std::vector<DiscreteMeasure>& parts) {
    DiscreteMeasure acc = DiscreteMeasure::dirac(0.0);
    for (const auto& p : parts) acc = convolve(acc, p);
    return acc;
}

DiscreteMeasure convolve_power(const DiscreteMeasure& mu, long k) {
    if (k < 0) throw DomainError("convolution power must be nonnegative");
    DiscreteMeasure result = DiscreteMeasure::dirac(0.0);
    DiscreteMeasure base = mu;
    // Square-and-multiply keeps the number of large convolutions logarithmic.
    while (k > 0) {
        if (k & 1) result = convolve(result, base);
        k >>= 1;
        if (k > 0) base = convolve(base, base);
    }
    return result;
}

DiscreteMeasure reflect(const DiscreteMeasure& mu) {
    std::vector<Atom> atoms = mu.atoms();
    for (auto& a : atoms) a.pos = -a.pos;
    return DiscreteMeasure(std::move(atoms), mu.defect());
}

Moments moments(const DiscreteMeasure& mu) {
    if (mu.empty()) throw DomainError("moments of a zero measure");
    auto x = mu.positions(), m = mu.masses();
    const auto& k = kernels::active();
    auto first = k.weighted_sums(x.data(), m.data(), x.size(), 0.0);
    if (!(first.s0 > 0.0)) throw DomainError("moments of a zero measure");
    double mean = first.s1 / first.s0;
    auto second = k.weighted_sums(x.data(), m.data(), x.size(), mean);
    double d = second.s1 / second.s0;
    double var = std::max(0.0, second.s2 / second.s0 - d * d);
    return {first.s0, mean + d, var};
}

double second_moment_about(const DiscreteMeasure& mu, double t) {
    if (mu.empty()) return 0.0;
    auto x = mu.positions(), m = mu.masses();
    return kernels::active().weighted_sums(x.data(), m.data(), x.size(), t).s2;
}

std::complex<double> char_fn(const DiscreteMeasure& mu, double omega) {
    double re = 0.0, im = 0.0;
    for (const auto& a : mu.atoms()) {
        double ph = omega * a.pos;
        re += a.mass * std::cos(ph);
        im += a.mass * std::sin(ph);
    }
    return {re, im};
}

double poisson_pmf(double lambda, long k) {
    if (k < 0) return 0.0;
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(-lambda + static_cast<double>(k) * std::log(lambda) - std::lgamma(static_cast<double>(k) + 1.0));
}

double poisson_tail(double lambda, long k) {
    if (k < 0) return 1.0;
    if (lambda == 0.0) return 0.0;
    // Summing the tail directly avoids the cancellation in 1 - cdf.
    double sum = 0.0;
    for (long j = k + 1;; ++j) {
        double p = poisson_pmf(lambda, j);
        sum += p;
        if (static_cast<double>(j) > lambda && (p <= sum * 1e-17 || p < 1e-320)) break;
    }
    return sum;
}

DiscreteMeasure compound_poisson(const DiscreteMeasure& intensity, double eps) {
    if (!(eps > 0.0)) throw DomainError("truncation tolerance must be positive");
    if (intensity.defect() != 0.0) throw DomainError("Poisson exponential needs an intensity without defect");
    double lambda = intensity.total_mass();
    if (lambda == 0.0) return DiscreteMeasure::dirac(0.0);
    long K = 0;
    double tail = poisson_tail(lambda, 0);
    while (tail >= eps) tail = poisson_tail(lambda, ++K);
    DiscreteMeasure step = normalize(intensity);
    std::vector<Atom> acc{{0.0, poisson_pmf(lambda, 0)}};
    DiscreteMeasure power = DiscreteMeasure::dirac(0.0);
    for (long k = 1; k <= K; ++k) {
        power = convolve(power, step);
        double w = poisson_pmf(lambda, k);
        for (const auto& a : power.atoms()) acc.push_back({a.pos, w * a.mass});
        if (acc.size() > kMaxAtoms) throw CapacityError("Poisson exponential support exceeds atom cap");
    }
    return DiscreteMeasure(std::move(acc), tail);
}

std::complex<double> compound_poisson_char_fn(const DiscreteMeasure& intensity, double omega) {
    std::complex<double> ex = char_fn(intensity, omega) - intensity.total_mass();
    return std::exp(ex);
}

DiscreteMeasure standard_poisson(double lambda, double a, double eps) {
    if (!(lambda > 0.0)) throw DomainError("standard Poisson needs lambda > 0");
    return compound_poisson(DiscreteMeasure::dirac(a, lambda), eps);
}

DiscreteMeasure two_point_gamma(double a) {
    if (!(a >= 0.0)) throw DomainError("two-point state needs a >= 0");
    double w = std::exp(-a);
    return DiscreteMeasure({{0.0, 1.0 / (1.0 + w)}, {a, w / (1.0 + w)}});
}

DiscreteMeasure rho_state(const std::vector<double>& a) {
    double z = 1.0;
    for (double ai : a) {
        if (!(ai >= 0.0)) throw DomainError("rho state needs nonnegative entries");
        z += std::exp(-ai);
    }
    std::vector<Atom> atoms{{0.0, 1.0 / z}};
    for (double ai : a) atoms.push_back({ai, std::exp(-ai) / z});
    return DiscreteMeasure(std::move(atoms));
}

std::vector<long> index_window(IndexDomain domain, long horizon) {
    std::vector<long> out;
    if (domain == IndexDomain::Naturals) {
        for (long n = 1; n <= horizon; ++n) out.push_back(n);
    } else {
        out.push_back(0);
        for (long n = 1; n <= horizon; ++n) {
            out.push_back(-n);
            out.push_back(n);
        }
    }
    return out;
}

MeasureSequence::MeasureSequence(IndexDomain domain, Generator gen, std::string label, CharFn cf)
    : domain_(domain), gen_(std::move(gen)), label_(std::move(label)), cf_(std::move(cf)) {}

DiscreteMeasure MeasureSequence::at(long n) const {
    if (domain_ == IndexDomain::Naturals && n < 1) throw DomainError("sequence indexed by naturals starts at 1");
    if (!gen_) throw DomainError("sequence has no generator");
    return gen_(n);
}

std::complex<double> MeasureSequence::char_fn(long n, double omega) const {
    if (cf_) return cf_(n, omega);
    return flowlab::char_fn(at(n), omega);
}

std::vector<long> MeasureSequence::window(long horizon) const { return index_window(domain_, horizon); }

}  // namespace flowlab
