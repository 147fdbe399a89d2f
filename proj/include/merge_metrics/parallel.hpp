#pragma once

#include <cstddef>
#include <functional>

namespace merge_metrics {

/// Worker count: MERGE_METRICS_THREADS when set to a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t thread_budget();

/// Calls body(i) for i in [0, count) on up to thread_budget() threads.
/// Indices are handed out dynamically and all of them run; the exception of
/// the lowest failing index is rethrown once the workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace merge_metrics
