#pragma once

#include <cstddef>
#include <functional>

namespace lh {

// Worker threads available to data-parallel loops: LH_THREADS if set and
// positive, otherwise the hardware concurrency.
std::size_t worker_count();

// Runs body(begin, end) over contiguous chunks of [0, count). Every index is
// visited exactly once; chunks never share output, so results do not depend
// on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 2048);

}  // namespace lh
