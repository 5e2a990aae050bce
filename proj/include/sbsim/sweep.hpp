// Parallel sweep helper: grid points are independent, results land in
// pre-assigned slots, so serial and parallel execution are bit-identical.

#pragma once

#include "sbsim/scatter.hpp"

#ifdef SBSIM_HAVE_OPENMP
#include <omp.h>
#endif

namespace sbsim {

template <typename Fn>
void sweep_for(int n, Execution exec, Fn&& fn) {
  if (exec == Execution::parallel) {
#ifdef SBSIM_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < n; ++i) fn(i);
  } else {
    for (int i = 0; i < n; ++i) fn(i);
  }
}

inline void set_worker_count(int n) {
#ifdef SBSIM_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace sbsim
