#pragma once

// Slot-based parallel map: workers pull indices from a shared counter and
// write into caller-owned slots, so results are identical for any thread
// count and merge order. threads <= 0 selects hardware concurrency.

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace qpsc {

inline int resolve_threads(int threads) {
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  int nt = resolve_threads(threads);
  if (nt <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace qpsc
