#pragma once

#include <cstddef>
#include <functional>

namespace levy {

/// Thread count from LEVY_THREADS, else the hardware concurrency (at least 1).
std::size_t default_threads();

/// Calls body(i) for i in [0, n) on up to `threads` workers. Results must be
/// written by index; if several calls throw, the one with the lowest index is
/// rethrown, so failures do not depend on scheduling.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace levy
