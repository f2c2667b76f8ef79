#pragma once

#include <cstddef>
#include <functional>

namespace nspregen {

/// max(1, hardware threads - 1), overridden by NSPREGEN_WORKERS when set.
int default_workers();

/// Runs fn(0..n-1) on up to `workers` threads. Indices are handed out in
/// order; the first exception thrown by fn is rethrown after all threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace nspregen
