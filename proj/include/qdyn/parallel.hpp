#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace qdyn {

/// Process-wide worker count used by the sweep kernels (>= 1).
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Tasks are
/// handed out in contiguous static blocks; callers write results into per-task
/// slots so that any later reduction is independent of the thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Pairwise (tree) summation in a fixed order.
double pairwise_sum(std::span<const double> values);

/// log(sum(exp(values))) by the same fixed tree; -inf for an empty span.
double pairwise_log_sum_exp(std::span<const double> log_values);

}  // namespace qdyn
