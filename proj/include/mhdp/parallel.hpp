#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace mhdp {

/// Runs body(i) for i in [0, n) on up to hardware_concurrency threads.
/// Iterations must be independent; results are written by index so the
/// outcome does not depend on scheduling.
template <class F>
void parallel_for(int n, F&& body) {
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int workers = std::min(hw, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mhdp
