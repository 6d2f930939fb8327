#pragma once

#include <cstddef>
#include <functional>

namespace hivmob {

/// Worker cap for parallel_for; 0 means hardware concurrency. Never changes results.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Calls fn(i) for i in [0, n). Tasks must write only to slots they own;
/// the first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hivmob
