#pragma once

#include <cstddef>
#include <functional>

namespace asymhash {

// Worker count: ASYMHASH_THREADS if set and positive, else the hardware
// concurrency (at least 1).
std::size_t thread_count();

// Runs body(i) for i in [begin, end), split into contiguous blocks across up
// to thread_count() threads. body must not write shared state outside of
// index i's own slot; callers reduce afterwards in a fixed order.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace asymhash
