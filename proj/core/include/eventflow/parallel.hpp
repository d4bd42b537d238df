#pragma once

#include <cstddef>
#include <functional>

namespace eventflow {

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. If calls throw, the
/// exception of the lowest failing index is rethrown after all workers stop,
/// so failures are reported deterministically.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace eventflow
