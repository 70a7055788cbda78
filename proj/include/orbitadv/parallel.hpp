#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace orbitadv {

// Runs fn(i) for i in [0, n) on up to `workers` threads.  Each invocation
// must confine its writes to data owned by index i (slot arrays); callers
// then reduce the slots in index order, so results never depend on thread
// scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
      fn(i);
  };
  std::vector<std::thread> pool;
  const int count = workers < static_cast<int>(n) ? workers : static_cast<int>(n);
  pool.reserve(count);
  for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

}  // namespace orbitadv
