#pragma once

#include <cstddef>
#include <functional>

namespace nspf {

/// Worker count: NSPF_THREADS if set to a positive integer, else the hardware
/// concurrency (at least 1).
int worker_count();

/// Runs fn(k) for k in [0, n) on up to worker_count() threads. Each index
/// must write only its own outputs; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nspf
