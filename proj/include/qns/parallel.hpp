#pragma once

#include <cstddef>
#include <functional>

namespace qns {

// Runs fn(0..count-1) on up to `jobs` worker threads (jobs <= 0: hardware
// concurrency). Work items must be independent; callers keep results
// addressable by index so output order never depends on scheduling.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace qns
