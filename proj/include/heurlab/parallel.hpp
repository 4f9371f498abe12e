#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace heurlab {

/// Number of OpenMP workers to use for `jobs` (0 means the runtime default).
[[nodiscard]] inline int resolve_jobs(int jobs) noexcept {
  return jobs > 0 ? jobs : omp_get_max_threads();
}

/// Runs body(i) for i in [0, n) across OpenMP workers. Iterations must write
/// to disjoint outputs. The first exception thrown by any iteration is
/// rethrown on the calling thread after the loop drains.
template <typename Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
  const int threads = resolve_jobs(jobs);
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace heurlab
