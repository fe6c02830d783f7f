#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace adanets {

// Static range partition over worker threads. Each index is processed by
// exactly one thread and results must go to disjoint slots, which keeps the
// output independent of the thread count.
template <typename Fn>
void parallel_for(std::int64_t begin, std::int64_t end, int threads, Fn&& fn) {
  std::int64_t count = end - begin;
  if (count <= 0) return;
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  int workers = threads > 0 ? threads : std::max(1, hw);
  workers = static_cast<int>(
      std::min<std::int64_t>(workers, count));
  if (workers <= 1) {
    for (std::int64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::int64_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::int64_t lo = begin + w * chunk;
    std::int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace adanets
