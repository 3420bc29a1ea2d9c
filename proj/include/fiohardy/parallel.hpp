#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace fiohardy {

inline int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Runs body(i) for i in [begin, end). Work is chunked dynamically over a small
// thread pool; bodies must not touch shared mutable state except through
// per-index slots. Reductions belong to the caller, performed afterwards in
// index order so that results do not depend on the thread count.
inline void parallel_for(std::size_t begin, std::size_t end,
                         const std::function<void(std::size_t)>& body,
                         int max_threads = 0) {
  if (end <= begin) return;
  int threads = max_threads > 0 ? max_threads : hardware_threads();
  const std::size_t count = end - begin;
  if (threads > static_cast<int>(count)) threads = static_cast<int>(count);
  if (threads <= 1) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{begin};
  const std::size_t chunk = std::max<std::size_t>(1, count / (4 * threads));
  auto worker = [&] {
    for (;;) {
      const std::size_t lo = next.fetch_add(chunk);
      if (lo >= end) return;
      const std::size_t hi = std::min(end, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) body(i);
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace fiohardy
