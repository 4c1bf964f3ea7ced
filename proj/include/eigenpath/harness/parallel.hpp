#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace eigenpath::harness {

/// Runs fn(i) for i in [0, count) on `jobs` threads. Results are stored by index, so the
/// output order does not depend on scheduling. fn must not throw.
template <typename Result, typename Fn>
std::vector<Result> run_indexed(std::size_t count, unsigned jobs, Fn fn) {
  std::vector<Result> out(count);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace eigenpath::harness
