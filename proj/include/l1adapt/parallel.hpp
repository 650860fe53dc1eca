#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace l1adapt {

/// Worker count for sweeps: L1ADAPT_THREADS if set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
int sweep_threads();

/// Evaluates fn(i) for i in [0, count) on up to sweep_threads() threads.
/// Results keep index order; the first exception thrown by any task is rethrown.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t count, Fn fn) {
  std::vector<Result> results(count);
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(sweep_threads()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace l1adapt
