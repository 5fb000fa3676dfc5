#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace ietidp {

/// Runs f(i) for i in [0, n) on up to `threads` threads in static contiguous
/// chunks. The first exception thrown (lowest chunk) is rethrown.
template <class F>
void parallel_for(int n, int threads, F&& f) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    const int lo = n * t / threads, hi = n * (t + 1) / threads;
    pool.emplace_back([&, t, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ietidp
