#pragma once

#include <cstddef>
#include <functional>

namespace stabidx {

/// Resolves a requested worker count: values <= 0 select the hardware
/// concurrency (at least 1).
int resolve_threads(int requested);

/// Runs fn(i) for every i in [0, n) across `threads` workers, partitioned in
/// contiguous blocks. Callers must write results into per-index slots; the
/// outcome is then identical for any worker count. The first exception thrown
/// by a worker is rethrown on the calling thread.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace stabidx
