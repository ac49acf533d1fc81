#include "flowlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "flowlab/errors.hpp"

namespace flowlab {

TransportSolution solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                  const std::vector<double>& cost) {
    const std::size_t n = supply.size(), m = demand.size();
    if (cost.size() != n * m) throw InternalError("transport cost matrix has the wrong shape");
    for (double c : cost)
        if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("transport costs must be finite and nonnegative");
    TransportSolution sol;
    if (n == 0 || m == 0) return sol;

    const double total = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double tol = 1e-15 * std::max(1.0, total);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // Node layout: S = 0, sources 1..n, sinks n+1..n+m, T = n+m+1.
    const std::size_t V = n + m + 2, S = 0, T = n + m + 1;
    auto src = [](std::size_t i) { return 1 + i; };
    auto snk = [n](std::size_t j) { return 1 + n + j; };

    std::vector<double> rem_s = supply, rem_d = demand;
    std::vector<double> flow(n * m, 0.0);
    std::vector<double> pot(V, 0.0), dist(V);
    std::vector<long> prev(V);
    std::vector<char> done(V);

    for (std::size_t j = 0; j < m; ++j) {
        double lo = kInf;
        for (std::size_t i = 0; i < n; ++i) lo = std::min(lo, cost[i * m + j]);
        pot[snk(j)] = lo;
    }
    pot[T] = *std::min_element(pot.begin() + static_cast<long>(snk(0)), pot.begin() + static_cast<long>(snk(m - 1)) + 1);

    auto relax = [&](std::size_t u, std::size_t v, double c) {
        if (done[v]) return;
        double nd = dist[u] + c + pot[u] - pot[v];
        if (nd < dist[v]) {
            dist[v] = nd;
            prev[v] = static_cast<long>(u);
        }
    };

    for (std::size_t iter = 0;; ++iter) {
        if (iter > 50 * (n + m) * (n + m) + 1000) throw InternalError("transport solver failed to converge");
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(prev.begin(), prev.end(), -1);
        std::fill(done.begin(), done.end(), 0);
        dist[S] = 0.0;
        for (;;) {
            std::size_t u = V;
            double best = kInf;
            for (std::size_t v = 0; v < V; ++v)
                if (!done[v] && dist[v] < best) best = dist[v], u = v;
            if (u == V) break;
            done[u] = 1;
            if (u == S) {
                for (std::size_t i = 0; i < n; ++i)
                    if (rem_s[i] > tol) relax(S, src(i), 0.0);
            } else if (u <= n) {
                std::size_t i = u - 1;
                if (supply[i] - rem_s[i] > tol) relax(u, S, 0.0);
                for (std::size_t j = 0; j < m; ++j) relax(u, snk(j), cost[i * m + j]);
            } else if (u < T) {
                std::size_t j = u - 1 - n;
                if (rem_d[j] > tol) relax(u, T, 0.0);
                for (std::size_t i = 0; i < n; ++i)
                    if (flow[i * m + j] > tol) relax(u, src(i), -cost[i * m + j]);
            } else {
                for (std::size_t j = 0; j < m; ++j)
                    if (demand[j] - rem_d[j] > tol) relax(T, snk(j), 0.0);
            }
        }
        if (!std::isfinite(dist[T])) break;
        double dmax = 0.0;
        for (std::size_t v = 0; v < V; ++v)
            if (std::isfinite(dist[v])) dmax = std::max(dmax, dist[v]);
        for (std::size_t v = 0; v < V; ++v) pot[v] += std::isfinite(dist[v]) ? dist[v] : dmax;

        // Bottleneck along the path T <- ... <- S.
        double push = kInf;
        for (std::size_t v = T; v != S; v = static_cast<std::size_t>(prev[v])) {
            std::size_t u = static_cast<std::size_t>(prev[v]);
            if (u == S) push = std::min(push, rem_s[v - 1]);
            else if (v == T) push = std::min(push, rem_d[u - 1 - n]);
            else if (u <= n && v > n) continue;  // forward arc, uncapacitated
            else if (u > n && v <= n && v >= 1) push = std::min(push, flow[(v - 1) * m + (u - 1 - n)]);
        }
        if (!(push > tol)) break;
        for (std::size_t v = T; v != S; v = static_cast<std::size_t>(prev[v])) {
            std::size_t u = static_cast<std::size_t>(prev[v]);
            if (u == S) rem_s[v - 1] -= push;
            else if (v == T) rem_d[u - 1 - n] -= push;
            else if (u <= n && v > n) flow[(u - 1) * m + (v - 1 - n)] += push;
            else flow[(v - 1) * m + (u - 1 - n)] -= push;
        }
        double left = 0.0;
        for (double r : rem_s) left += std::max(r, 0.0);
        if (left <= tol) break;
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double f = flow[i * m + j];
            if (f > tol) {
                sol.flows.push_back({i, j, f});
                sol.cost += f * cost[i * m + j];
            }
        }
    return sol;
}

}  // namespace flowlab
