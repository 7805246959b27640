#pragma once

#include <cstddef>
#include <functional>

namespace blicket {

// Worker count: BLICKET_THREADS if set to a positive integer, otherwise the
// hardware concurrency.
unsigned worker_count();

// Runs body(i) for every i in [0, n). Each index is executed exactly once;
// callers write results into per-index slots so the reduction order stays
// fixed regardless of scheduling. The first exception thrown by a body is
// rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

}  // namespace blicket
