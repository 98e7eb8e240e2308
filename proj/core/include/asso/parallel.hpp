#pragma once

#include <cstddef>
#include <functional>

namespace asso {

// Upper bound on worker threads used by data-parallel loops. 0 restores the
// default (hardware concurrency).
void set_max_threads(std::size_t n);
std::size_t max_threads();

// Runs body(i) for i in [begin, end) across up to max_threads() workers in
// contiguous chunks. The first exception thrown by any worker is rethrown on
// the calling thread after all workers finish.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

} // namespace asso
