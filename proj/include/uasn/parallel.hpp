#pragma once

#if defined(_OPENMP)
#include <omp.h>
#endif

#include <cstdint>

namespace uasn {

// Serial is the reference path; Parallel must produce identical results.
enum class ExecPolicy { Serial, Parallel };

inline int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline int thread_id() {
#if defined(_OPENMP)
  return omp_get_thread_num();
#else
  return 0;
#endif
}

/// f(i) for i in [begin, end). Iterations must be independent.
template <class F>
void parallel_for(ExecPolicy policy, std::int64_t begin, std::int64_t end, F&& f) {
  if (policy == ExecPolicy::Serial) {
    for (std::int64_t i = begin; i < end; ++i) f(i);
    return;
  }
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = begin; i < end; ++i) f(i);
}

}  // namespace uasn
