#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fracdiff {

/// Runs fn(i) for i in [0, count) on up to n_threads workers (0 = hardware
/// concurrency). Work items must write to disjoint state. The first exception
/// thrown by a worker is rethrown on the calling thread.
inline void parallel_for(long count, const std::function<void(long)>& fn, int n_threads = 0) {
  if (count <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  long workers = n_threads > 0 ? n_threads : static_cast<long>(hw);
  workers = std::min<long>(workers, count);
  if (workers <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (long w = 0; w < workers; ++w) {
    const long lo = w * count / workers;
    const long hi = (w + 1) * count / workers;
    pool.emplace_back([&, lo, hi]() {
      try {
        for (long i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fracdiff
