#pragma once

#include <cstddef>
#include <functional>

namespace mechband {

/// Worker count: MECHBAND_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t thread_count();

/// Splits [0, count) into contiguous chunks and runs `body(begin, end)` on
/// each, one chunk per worker. Runs inline when one worker suffices.
/// Exceptions from any chunk are rethrown on the calling thread.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t max_workers = 0);

}  // namespace mechband
