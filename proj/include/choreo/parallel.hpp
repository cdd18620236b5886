#pragma once

#include <cstddef>
#include <functional>

namespace choreo {

/// Worker count used by the analysis loops. Defaults to the hardware
/// concurrency (at least 1).
int thread_count();
/// Values below 1 restore the default.
void set_thread_count(int threads);

/// Calls fn(i) for i in [0, count), spread over thread_count() workers.
/// Callers write results into per-index slots, so the outcome does not depend
/// on scheduling. If any call throws, the exception with the lowest index is
/// rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace choreo
