#pragma once

#include <cstddef>
#include <functional>

namespace holo {

/// Worker count used by data-parallel loops. 0 selects the hardware
/// concurrency. Results never depend on this value.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Calls body(i) for every i in [0, n), split into contiguous chunks across
/// worker threads. body must not touch shared mutable state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace holo
