#pragma once

#include <functional>
#include <thread>
#include <vector>

#include "hsnn/types.hpp"

namespace hsnn {

/// Static-partition parallel loop over [0, n). Each index is processed exactly
/// once; callers write results into preallocated slots, so the outcome is
/// independent of thread count and scheduling.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  require(threads >= 1, "parallel_for: thread count must be positive");
  if (n <= 0) return;
  const int workers = std::min(threads, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<int> error_index(workers, -1);
  for (int w = 0; w < workers; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
    const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    pool.emplace_back([lo, hi, w, &fn, &errors, &error_index] {
      for (int i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          error_index[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  // rethrow deterministically: the failure at the lowest index wins
  int first = -1;
  for (int w = 0; w < workers; ++w)
    if (errors[w] && (first < 0 || error_index[w] < error_index[first])) first = w;
  if (first >= 0) std::rethrow_exception(errors[first]);
}

}  // namespace hsnn
