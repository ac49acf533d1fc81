#pragma once

// Independent reference implementations for tests. None of these call into the library's
// algorithms; they only read DiscreteMeasure atoms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "flowlab/measure.hpp"

namespace oracle {

// Positions on a 1/64 grid keep map keys exact.
using Grid = std::map<long long, double>;

inline long long key(double x) { return std::llround(x * 64.0); }
inline double pos(long long k) { return static_cast<double>(k) / 64.0; }

inline Grid grid(const flowlab::DiscreteMeasure& mu) {
    Grid g;
    for (const auto& a : mu.atoms()) g[key(a.pos)] += a.mass;
    return g;
}

inline Grid convolve(const Grid& a, const Grid& b) {
    Grid out;
    for (const auto& [x, p] : a)
        for (const auto& [y, q] : b) out[x + y] += p * q;
    return out;
}

inline double mass(const Grid& g) {
    double s = 0.0;
    for (const auto& [k, m] : g) s += m;
    return s;
}

// sum_x |a(x) - b(x)| over the union of supports
inline double l1(const Grid& a, const Grid& b) {
    Grid u = a;
    for (const auto& [k, m] : b) u[k] += 0.0;
    double s = 0.0;
    for (const auto& [k, m] : u) {
        auto ia = a.find(k), ib = b.find(k);
        s += std::abs((ia == a.end() ? 0.0 : ia->second) - (ib == b.end() ? 0.0 : ib->second));
    }
    return s;
}

inline double hellinger_sq(const Grid& a, const Grid& b) {
    double aff = 0.0;
    for (const auto& [k, m] : a) {
        auto it = b.find(k);
        if (it != b.end()) aff += std::sqrt(m * it->second);
    }
    return 1.0 - aff;
}

// e^-lambda lambda^k / k! by the product recurrence
inline double poisson_pmf(double lambda, long k) {
    double p = std::exp(-lambda);
    for (long i = 1; i <= k; ++i) p *= lambda / static_cast<double>(i);
    return p;
}

// exp(-|mu|) sum_k mu^{*k} / k!, terms up to kmax
inline Grid compound_poisson(const Grid& mu, int kmax) {
    double m = mass(mu);
    Grid out;
    Grid power{{0, 1.0}};
    double fact = 1.0;
    for (int k = 0; k <= kmax; ++k) {
        if (k > 0) {
            power = convolve(power, mu);
            fact *= static_cast<double>(k);
        }
        for (const auto& [x, p] : power) out[x] += std::exp(-m) * p / fact;
    }
    return out;
}

// min c.x subject to A x = b, x >= 0 (b >= 0). Two-phase dense tableau simplex with Bland's
// rule. Small instances only.
inline double simplex_min(std::vector<std::vector<double>> A, std::vector<double> b, const std::vector<double>& c) {
    const std::size_t m = A.size(), n = c.size();
    const double eps = 1e-12;
    // Columns: n originals, m artificials, then rhs.
    std::vector<std::vector<double>> T(m, std::vector<double>(n + m + 1, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (b[i] < 0) {
            for (auto& v : A[i]) v = -v;
            b[i] = -b[i];
        }
        for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
        T[i][n + i] = 1.0;
        T[i][n + m] = b[i];
        basis[i] = n + i;
    }
    auto pivot = [&](std::size_t r, std::size_t col) {
        double p = T[r][col];
        for (auto& v : T[r]) v /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || T[i][col] == 0.0) continue;
            double f = T[i][col];
            for (std::size_t j = 0; j <= n + m; ++j) T[i][j] -= f * T[r][j];
        }
        basis[r] = col;
    };
    auto run = [&](const std::vector<double>& cost, std::size_t allowed) {
        for (int iter = 0; iter < 100000; ++iter) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                double r = cost[j];
                for (std::size_t i = 0; i < m; ++i) r -= cost[basis[i]] * T[i][j];
                if (r < -eps) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed) return;
            std::size_t leave = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                if (T[i][enter] > eps) {
                    double ratio = T[i][n + m] / T[i][enter];
                    if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == m) throw std::runtime_error("simplex oracle: unbounded");
            pivot(leave, enter);
        }
        throw std::runtime_error("simplex oracle: iteration limit");
    };
    std::vector<double> phase1(n + m, 0.0);
    for (std::size_t i = 0; i < m; ++i) phase1[n + i] = 1.0;
    run(phase1, n + m);
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(T[i][j]) > 1e-9) {
                pivot(i, j);
                break;
            }
    }
    std::vector<double> phase2(n + m, 0.0);
    for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
    run(phase2, n);
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) z += phase2[basis[i]] * T[i][n + m];
    return z;
}

// Optimal transport value between supply and demand with cost[i][j], by the simplex oracle.
inline double transport(const std::vector<double>& supply, const std::vector<double>& demand,
                        const std::vector<std::vector<double>>& cost) {
    const std::size_t n = supply.size(), k = demand.size();
    std::vector<std::vector<double>> A;
    std::vector<double> b, c;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(n * k, 0.0);
        for (std::size_t j = 0; j < k; ++j) row[i * k + j] = 1.0;
        A.push_back(row);
        b.push_back(supply[i]);
    }
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> row(n * k, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i * k + j] = 1.0;
        A.push_back(row);
        b.push_back(demand[j]);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) c.push_back(cost[i][j]);
    return simplex_min(A, b, c);
}

// W2^2 (or the cutoff variant when kappa is finite) of probability measures; defects become a
// symbolic atom whose every cost is kappa^2.
inline double w2_sq(const flowlab::DiscreteMeasure& mu, const flowlab::DiscreteMeasure& nu,
                    double kappa = std::numeric_limits<double>::infinity()) {
    std::vector<double> xs, ys, s, d;
    for (const auto& a : mu.atoms()) {
        xs.push_back(a.pos);
        s.push_back(a.mass);
    }
    for (const auto& a : nu.atoms()) {
        ys.push_back(a.pos);
        d.push_back(a.mass);
    }
    const bool dm = mu.defect() > 0.0, dn = nu.defect() > 0.0;
    if (dm) s.push_back(mu.defect());
    if (dn) d.push_back(nu.defect());
    const double cap = kappa * kappa;
    std::vector<std::vector<double>> cost(s.size(), std::vector<double>(d.size(), cap));
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j) cost[i][j] = std::min((xs[i] - ys[j]) * (xs[i] - ys[j]), cap);
    // Balance tiny mass mismatches onto the last column.
    double ds = 0.0, dd = 0.0;
    for (double v : s) ds += v;
    for (double v : d) dd += v;
    d.back() += ds - dd;
    return transport(s, d, cost);
}

// Random probability measure with up to max_atoms atoms on the 1/4 grid in [lo, hi].
inline flowlab::DiscreteMeasure random_measure(std::mt19937_64& rng, int max_atoms, double lo, double hi,
                                               double total = 1.0) {
    std::uniform_int_distribution<int> count(1, max_atoms);
    std::uniform_int_distribution<int> slot(static_cast<int>(lo * 4), static_cast<int>(hi * 4));
    std::uniform_real_distribution<double> w(0.05, 1.0);
    int k = count(rng);
    std::vector<flowlab::Atom> atoms;
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        double m = w(rng);
        atoms.push_back({slot(rng) / 4.0, m});
        sum += m;
    }
    for (auto& a : atoms) a.mass *= total / sum;
    return flowlab::DiscreteMeasure(std::move(atoms));
}

}  // namespace oracle
