#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace crom {

// Worker cap: CROM_THREADS if set, else hardware concurrency, at least 1.
inline int max_threads() {
  if (const char* env = std::getenv("CROM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n). Work is split into contiguous ranges, one per
// worker; every index writes only its own outputs, so results are identical
// for any thread count. The first exception thrown is rethrown here.
template <class Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn, int grain = 1) {
  if (n <= 0) return;
  const int want = static_cast<int>(std::min<std::ptrdiff_t>(max_threads(), (n + grain - 1) / grain));
  if (want <= 1) {
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(want);
  const std::ptrdiff_t chunk = (n + want - 1) / want;
  for (int t = 0; t < want; ++t) {
    const std::ptrdiff_t lo = t * chunk;
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi]() {
      try {
        for (std::ptrdiff_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace crom
