#pragma once

#include <cstddef>
#include <functional>

namespace reslab {

/// Worker count used when a call does not pass one explicitly. Starts from
/// RESLAB_THREADS if set, otherwise 1.
int default_threads();
void set_default_threads(int n);

/// Runs body(i) for i in [0, n). Each index must write only its own output
/// slot; callers merge results in index order, so output never depends on
/// the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads = 0);

}  // namespace reslab
