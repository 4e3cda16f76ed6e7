#pragma once

// Minimal data-parallel loop with a thread budget controlled by the
// QPROC_THREADS environment variable.  Work items write to disjoint output
// slots, so results are bit-identical regardless of the thread count.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qproc {

inline int thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  int budget = static_cast<int>(hw);
  if (const char* env = std::getenv("QPROC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) budget = std::min<long>(budget, v);
  }
  return budget;
}

// Runs body(i) for i in [0, n).  body must only touch state owned by item i.
template <class F>
void parallel_for(int n, F&& body) {
  if (n <= 0) return;
  const int workers = std::min(thread_budget(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace qproc
