#pragma once

#include <cstddef>
#include <functional>

namespace hull_lab {

// Worker count resolution: 1 when sequential mode is forced, otherwise
// min(HULL_LAB_THREADS, hardware concurrency). Default is sequential so
// that plain library use is deterministic without any setup.
void set_sequential(bool on);
bool sequential_mode();
int worker_count();

// Runs body(begin, end) over a chunked partition of [0, n). Results must be
// written to per-index storage; reductions are the caller's job and should
// scan in index order so the outcome is identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace hull_lab
