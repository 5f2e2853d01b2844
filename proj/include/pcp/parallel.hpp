#pragma once

#include <cstddef>
#include <functional>

namespace pcp {

/// Calls body(begin, end) on contiguous chunks of [0, n) using up to
/// `threads` workers.  threads <= 1 runs inline.  The first exception thrown
/// by any chunk is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)> &body);

/// Worker count from PCP_THREADS, or fallback when unset or invalid.
int threads_from_env(int fallback = 1);

}  // namespace pcp
