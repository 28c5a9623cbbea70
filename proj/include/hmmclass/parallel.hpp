#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace hmmclass {

// Worker count: HMMCLASS_THREADS env var if set, else hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("HMMCLASS_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs fn(job) for job = 0..n_jobs-1 on up to thread_count() threads.
// Jobs must be independent; callers write results into per-job slots so the
// outcome does not depend on scheduling.
template <typename Fn>
void parallel_for_jobs(std::size_t n_jobs, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(thread_count(), n_jobs);
  if (workers <= 1) {
    for (std::size_t j = 0; j < n_jobs; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t j = next.fetch_add(1); j < n_jobs; j = next.fetch_add(1)) fn(j);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hmmclass
