#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace quench_duo {

/// Worker count from QUENCH_DUO_THREADS (unset or 0 means hardware concurrency).
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("QUENCH_DUO_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  char* end = nullptr;
  long requested = std::strtol(env, &end, 10);
  if (end == env || requested <= 0) return hw;
  return static_cast<unsigned>(requested);
}

/// Runs body(i) for i in [0, count) over contiguous static chunks.
/// Each index must write only its own output slot; the partition never
/// changes results, so output is independent of the thread count.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  unsigned workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(workers);
  std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

}  // namespace quench_duo
