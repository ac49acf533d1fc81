#pragma once

#include <cstddef>
#include <functional>

namespace flowlab {

// Worker count: FLOWLAB_THREADS when set and positive, else the hardware concurrency.
std::size_t thread_count();

// Runs body(i) for i in [0, n) over contiguous chunks. Callers write results into
// per-index slots so reductions stay in index order and therefore deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace flowlab
