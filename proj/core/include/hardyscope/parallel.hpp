#pragma once

#include <cstddef>
#include <functional>

namespace hardyscope {

// Process-wide worker count used by the batched operations. Zero selects the
// hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n) over contiguous static chunks. Every index is
// visited exactly once; callers write results into pre-sized slots so the
// output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hardyscope
