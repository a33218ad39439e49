#pragma once

#include <cstddef>
#include <cstdint>

namespace mac {

/// Worker count from MAC_ETD_THREADS (integer >= 1). Defaults to 1 when unset.
/// Throws ConfigError on a malformed value.
int thread_count();

/// Override for the current process; 0 restores the environment lookup.
void set_thread_count(int n);

/// Runs fn(i) for i in [0, n). Iterations must write disjoint data.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const auto count = static_cast<std::int64_t>(n);
#if defined(_OPENMP)
  const int threads = thread_count();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::int64_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
#else
  for (std::int64_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
#endif
}

}  // namespace mac
