#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace ergo {

/// Worker count used for per-state solves and simulation batches.
/// `requested > 0` wins; otherwise the ERGO_THREADS environment variable;
/// otherwise 1.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ERGO_THREADS")) {
    int k = std::atoi(env);
    if (k > 0) return k;
  }
  return 1;
}

/// Runs fn(lo, hi) over contiguous chunks of [0, n_items) on `threads`
/// workers. Exceptions from workers are re-thrown on the calling thread.
inline void parallel_chunks(int n_items, int threads,
                            const std::function<void(int, int)>& fn) {
  threads = std::max(1, std::min(threads, n_items));
  if (threads == 1) {
    fn(0, n_items);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const int chunk = (n_items + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n_items, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, t, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace ergo
