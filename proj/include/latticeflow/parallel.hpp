#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace latticeflow {

// Worker count: hardware concurrency capped by LATTICEFLOW_THREADS.
inline int thread_budget() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("LATTICEFLOW_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

// Plain chunked parallel for over [0, count). Results must not depend on
// chunk boundaries; callers only do independent writes or associative maxima.
inline void parallel_for(int count, const std::function<void(int)>& body) {
  const int workers = std::min(thread_budget(), count);
  if (workers <= 1 || count < 1024) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace latticeflow
