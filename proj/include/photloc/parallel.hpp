#pragma once

// Deterministic worker pool: [0,n) is split into contiguous chunks, every
// iteration writes only its own output slot, and all reductions happen
// afterwards in index order. Results are identical for any thread count.

#include <cstddef>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace photloc {

inline int resolve_threads(int requested) {
  if (requested < 0) throw std::invalid_argument("threads must be >= 0");
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const int t = resolve_threads(threads);
  if (t <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::exception_ptr err;
  std::mutex err_mu;
  for (int w = 0; w < t; ++w) {
    const std::size_t lo = n * static_cast<std::size_t>(w) / t;
    const std::size_t hi = n * static_cast<std::size_t>(w + 1) / t;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace photloc
