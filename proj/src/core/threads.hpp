#pragma once

#include <cstddef>
#include <functional>

namespace zsml {

/// Worker cap: hardware concurrency unless the ILL_THREADS environment
/// variable lowers it (values < 1 are ignored).
std::size_t worker_count();

/// Runs fn(0) .. fn(jobs-1) across workers. Callers must write results into
/// per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace zsml
