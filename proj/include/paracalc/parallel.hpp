#pragma once

#include <cstddef>
#include <functional>

namespace paracalc {

// Worker count for parallel_for; 0 means hardware concurrency.
void set_thread_count(unsigned k);
unsigned thread_count();

// Runs f(0..count-1) across the worker pool. Each index writes only its own slot, so results are
// independent of scheduling. The first exception thrown by any task is rethrown after all joins.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f);

}  // namespace paracalc
