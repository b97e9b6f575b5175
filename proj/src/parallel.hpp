#ifndef DGFCT_PARALLEL_HPP
#define DGFCT_PARALLEL_HPP

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dgfct
{

void set_num_threads(int n);
int num_threads();

// Static-schedule loop over [0, n). Bodies must write only to locations they
// own; reductions are done by the caller over per-chunk results so that the
// output is independent of the thread count.
template <typename F>
void parallel_for(int n, F &&body)
{
#ifdef _OPENMP
   #pragma omp parallel for schedule(static) num_threads(num_threads())
   for (int i = 0; i < n; i++) { body(i); }
#else
   for (int i = 0; i < n; i++) { body(i); }
#endif
}

} // namespace dgfct

#endif
