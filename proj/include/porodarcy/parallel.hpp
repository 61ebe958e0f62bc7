#pragma once

#include <functional>

namespace porodarcy {

/// Worker count: PORODARCY_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace porodarcy
