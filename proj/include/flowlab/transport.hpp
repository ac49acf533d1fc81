#pragma once

#include <cstddef>
#include <vector>

namespace flowlab {

struct TransportFlow {
    std::size_t src;
    std::size_t tgt;
    double mass;
};

struct TransportSolution {
    std::vector<TransportFlow> flows;
    double cost = 0.0;
};

// Exact balanced transportation problem: minimize sum c[i*m+j] f_ij subject to row sums
// `supply` and column sums `demand`, f >= 0. Solved by successive shortest paths with
// reduced-cost potentials (Dijkstra on the dense residual graph). Costs must be >= 0.
TransportSolution solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                  const std::vector<double>& cost);

}  // namespace flowlab
