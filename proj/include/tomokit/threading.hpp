// Minimal deterministic parallel-for. Thread count is capped by the
// TOMOKIT_THREADS environment variable (0 or unset = hardware concurrency).
#pragma once

#include <cstddef>
#include <functional>

namespace tomokit {

// Effective worker count for `n` independent tasks.
std::size_t thread_budget(std::size_t n);

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks; results
// must be written to disjoint, preallocated slots so ordering is preserved.
// The first exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tomokit
