#pragma once

#include <cstddef>
#include <functional>

namespace ophydro {

// Worker count used by the parallel drivers: the OPHYDRO_THREADS environment
// variable when set, otherwise std::thread::hardware_concurrency().
int default_thread_count();

// Static partition of [0, n) into contiguous chunks, one per worker. The
// callback receives (begin, end, worker_index). Runs inline when a single
// worker suffices. Results must not depend on the partition; anything order
// sensitive (histogram sums, reductions) is merged by the caller in index
// order.
void parallel_for(std::size_t n, int n_threads,
                  const std::function<void(std::size_t, std::size_t, int)>& body);

}  // namespace ophydro
