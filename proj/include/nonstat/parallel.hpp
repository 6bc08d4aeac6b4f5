#pragma once

#include <cstddef>
#include <functional>

namespace nonstat {

/// Worker cap for library-internal parallel loops. Initialized from the
/// NONSTAT_THREADS environment variable, otherwise hardware concurrency.
std::size_t max_threads();
void set_max_threads(std::size_t n);

/// Runs body(i) for i in [0, n) over up to max_threads() workers. Callers
/// write results into slot i so the outcome is independent of scheduling.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nonstat
