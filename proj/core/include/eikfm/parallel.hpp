#pragma once

#include <cstddef>
#include <functional>

namespace eikfm {

/// Worker count for per-source loops: EIK_THREADS if set to a positive
/// integer, otherwise the hardware concurrency (at least 1).
int source_threads();

/// Runs fn(0..n-1) on up to source_threads() threads. Each index is handled
/// exactly once; callers write results into per-index slots and reduce them
/// afterwards in index order so results do not depend on scheduling. The
/// first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace eikfm
