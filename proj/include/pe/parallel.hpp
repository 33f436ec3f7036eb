#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace pe {

/// Runs fn(i) for i in [0, n) on up to `threads` threads with a static,
/// contiguous partition. Each index is handled by exactly one thread, so
/// callers that write only to slot i get schedule-independent results. The
/// first exception thrown by any worker is rethrown on the calling thread.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2 * threads) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const int chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, w, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace pe
