#pragma once

#include <algorithm>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace voi {

// Thread budget for batch kernels. Setting VOI_THREADS to a positive integer
// caps the OpenMP thread count.
inline int thread_budget() {
#ifdef _OPENMP
  int budget = omp_get_max_threads();
  if (const char* env = std::getenv("VOI_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) budget = std::min(budget, cap);
  }
  return budget;
#else
  return 1;
#endif
}

// Runs fn(i) for i in [0, count). Iterations must be independent; results
// written by index are deterministic for any thread count.
template <typename Fn>
void parallel_for(long long count, Fn&& fn) {
#ifdef _OPENMP
  const int threads = thread_budget();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long long i = 0; i < count; ++i) fn(i);
#else
  for (long long i = 0; i < count; ++i) fn(i);
#endif
}

// Reference loop used by the *_serial kernels and the benchmarks.
template <typename Fn>
void serial_for(long long count, Fn&& fn) {
  for (long long i = 0; i < count; ++i) fn(i);
}

}  // namespace voi
