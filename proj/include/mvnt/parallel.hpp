#pragma once

#include <functional>

namespace mvnt {

/// Runs body(i) for i in [0, count) across a thread pool. Work is sharded by
/// index, so results written to index-addressed slots are identical for any
/// thread count (including the sequential fallback). threads = 0 picks
/// hardware concurrency; the MVNT_THREADS environment variable overrides.
void parallel_for(long count, const std::function<void(long)>& body, int threads = 0);

/// Resolved worker count for the given request.
int effective_threads(int threads);

}  // namespace mvnt
