#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pdcshape {

namespace detail {
inline std::atomic<std::size_t>& worker_override() {
  static std::atomic<std::size_t> value{0};
  return value;
}
}  // namespace detail

/// Number of worker threads used for sweeps and quadrature curves.
/// 0 restores the default (hardware concurrency).
inline void set_parallelism(std::size_t workers) { detail::worker_override() = workers; }

namespace detail {

// Runs fn(i) for i in [0, n) on a small thread pool. Each index is handled
// exactly once, so callers writing to slot i get order-independent output.
// The first exception thrown (lowest index) is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t requested = worker_override().load();
  const std::size_t workers = std::min<std::size_t>(
      n, requested ? requested : std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = n;
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail
}  // namespace pdcshape
