#pragma once

#include <cstddef>
#include <functional>

namespace irscov {

// Worker count from IRSCOV_THREADS, else hardware concurrency (at least 1).
std::size_t default_worker_count();

// Runs task(i) for every i in [0, count) on up to `workers` threads. Each
// index is visited exactly once; callers write results into per-index slots
// and reduce them afterwards in index order. The first exception thrown by a
// task is rethrown on the calling thread.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& task);

}  // namespace irscov
