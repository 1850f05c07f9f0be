#pragma once

#include <cstddef>
#include <functional>

namespace rydreg {

// Worker count: RYDREG_THREADS when set and positive, else hardware
// concurrency (at least 1).
unsigned thread_count();

// Calls body(i) for i in [0, count) across thread_count() workers. Indices
// are split into contiguous blocks, so results written to per-index slots
// are independent of the thread count. The first exception thrown by any
// worker is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace rydreg
