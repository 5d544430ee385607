#pragma once

#include <cstddef>
#include <functional>

namespace fsel {

unsigned resolve_threads(unsigned requested);  // 0 -> hardware concurrency

// Runs fn(i) for i in [0, n) across up to `threads` workers. Work items must be
// independent; callers get determinism by writing results into per-index slots.
// The first exception thrown by any item is rethrown on the calling thread.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace fsel
