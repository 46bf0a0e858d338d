#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ergm {

/// Worker cap shared by every parallel loop in the library.
/// 0 means "use ERGM_VAREST_THREADS, else hardware concurrency".
void set_max_threads(unsigned threads);
unsigned max_threads();

namespace detail {
/// True on threads currently executing a parallel_for body; nested loops
/// then run inline instead of oversubscribing.
inline thread_local bool in_parallel_region = false;
} // namespace detail

/// Runs body(i) for i in [0, count). Each index is executed exactly once;
/// callers write results into slot i so the outcome does not depend on
/// scheduling. The first exception thrown by any body is rethrown.
template <class Body> void parallel_for(std::size_t count, Body &&body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, max_threads()), count);
  if (workers <= 1 || detail::in_parallel_region) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    const bool outer = detail::in_parallel_region;
    detail::in_parallel_region = true;
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
      }
    }
    detail::in_parallel_region = outer;
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w)
    pool.emplace_back(run);
  run();
  pool.clear();
  if (error)
    std::rethrow_exception(error);
}

} // namespace ergm
