#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace skillroute::detail {

/// Runs job(i) for every i < count on at most `width` threads. The
/// lowest-index failure is rethrown once every worker has finished.
inline void run_bounded(std::size_t count, std::size_t width, const std::function<void(std::size_t)>& job) {
  if (count == 0) return;
  width = std::clamp<std::size_t>(width, 1, count);
  std::vector<std::exception_ptr> failures(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  if (width == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < width; ++t) pool.emplace_back(worker);
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

}  // namespace skillroute::detail
