#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace vinesim {

/// Deterministic data-parallel loop: contiguous index chunks per worker and
/// no shared mutable state, so results never depend on scheduling. Falls back
/// to the calling thread for small ranges or single-core machines.
template <typename Fn>
void parallel_for(size_t n, Fn&& fn, unsigned max_threads = 0) {
  unsigned hw = std::thread::hardware_concurrency();
  unsigned workers = max_threads ? std::min(max_threads, hw ? hw : 1u) : (hw ? hw : 1u);
  if (workers <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  workers = std::min<size_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    size_t lo = w * chunk;
    size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace vinesim
