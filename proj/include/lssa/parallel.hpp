#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lssa {

// Runs fn(0), ..., fn(n_jobs - 1) over at most n_workers threads. Job order
// is unspecified; callers must write results by job index. The first
// exception thrown by any job is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n_jobs, std::size_t n_workers, Fn&& fn) {
  if (n_jobs == 0) return;
  if (n_workers <= 1 || n_jobs == 1) {
    for (std::size_t k = 0; k < n_jobs; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t n_threads = std::min(n_workers, n_jobs);
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    threads.emplace_back([&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= n_jobs || failed.load()) return;
        try {
          fn(k);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lssa
