#pragma once

#include <cstddef>
#include <functional>

namespace lexfp {

/// Worker count used by the parallel sweeps. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls fn(i) for every i in [0, n). Iterations must write disjoint outputs;
/// the result is then independent of scheduling. Exceptions from workers are
/// rethrown on the calling thread (the first one by index range).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace lexfp
