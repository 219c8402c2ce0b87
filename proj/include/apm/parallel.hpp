#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace apm {

// Deterministic parallel map over index blocks: the range [0, n) is split into
// fixed contiguous blocks, each worker fills its own slots, and the caller
// reduces in ascending block order. Results never depend on thread timing.
template <typename T, typename Fn>
std::vector<T> parallel_blocks(std::size_t n_blocks, Fn&& block_fn,
                               unsigned max_threads = 0) {
  std::vector<T> out(n_blocks);
  unsigned hw = max_threads ? max_threads : std::thread::hardware_concurrency();
  if (hw < 1) hw = 1;
  if (hw == 1 || n_blocks <= 1) {
    for (std::size_t i = 0; i < n_blocks; ++i) out[i] = block_fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::size_t per = (n_blocks + hw - 1) / hw;
  for (unsigned w = 0; w < hw; ++w) {
    std::size_t lo = w * per, hi = std::min(n_blocks, lo + per);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = block_fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace apm
