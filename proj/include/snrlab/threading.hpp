#pragma once

#include <functional>

namespace snrlab {

// Worker cap: SNRLAB_THREADS if set (>=1), else hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n) across workers. Callers write to disjoint,
// index-addressed slots; reductions happen afterwards in index order, so the
// result is identical for every worker count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace snrlab
