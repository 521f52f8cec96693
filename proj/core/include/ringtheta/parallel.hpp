#pragma once

#include <cstddef>
#include <functional>

namespace ringtheta {

// Worker count: RINGTHETA_THREADS if set (>= 1), else hardware concurrency.
unsigned thread_count();
void set_thread_count(unsigned n);  // 0 restores the default

// Runs body(i) for i in [0, n). Each index writes its own slot, so results are
// order-independent. The first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ringtheta
