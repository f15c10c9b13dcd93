#pragma once

#include <cstddef>
#include <functional>

namespace graphmask {

/// Hardware concurrency, capped by the GRAPHMASK_THREADS environment
/// variable when it holds a positive integer.
int default_thread_count();

/// Runs fn(0) .. fn(count - 1) on up to `threads` workers (0 = default).
/// If any call throws, the exception of the lowest failing index is rethrown
/// after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace graphmask
