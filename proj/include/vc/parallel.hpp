#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace vc {

// Thread count policy: the VC_THREADS environment variable overrides the
// requested value; requested <= 0 means hardware concurrency.
int resolve_threads(int requested);

// Runs body(begin, end) over a fixed contiguous partition of [0, n) into
// `threads` chunks. The partition depends only on (n, threads); workers
// write to disjoint slots, so results cannot depend on scheduling. Callers
// that need thread-count-independent output must also keep every reduction
// in a fixed serial order after the join.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace vc
