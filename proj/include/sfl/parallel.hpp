#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace sfl {

// Runs fn(t) for t in [0, trials) on `workers` threads.  Trials are pulled
// from a shared counter but every result lands in its own slot, so the
// returned vector is byte-identical to a sequential run.
template <typename T, typename Fn>
std::vector<T> run_trials(std::int64_t trials, int workers, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(trials));
  if (workers <= 1 || trials <= 1) {
    for (std::int64_t t = 0; t < trials; ++t) {
      out[static_cast<std::size_t>(t)] = fn(t);
    }
    return out;
  }
  std::atomic<std::int64_t> next{0};
  auto body = [&] {
    for (;;) {
      std::int64_t t = next.fetch_add(1);
      if (t >= trials) return;
      out[static_cast<std::size_t>(t)] = fn(t);
    }
  };
  std::vector<std::thread> pool;
  int count = std::min<std::int64_t>(workers, trials);
  pool.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  return out;
}

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace sfl
