#pragma once

#include <cstddef>
#include <functional>

namespace euaf {

// Worker count: EUAF_THREADS when set (>=1), otherwise the hardware count.
std::size_t thread_count();

// Runs fn(chunk_index) for chunk_index in [0, n_chunks), distributing
// chunks over the worker pool.  fn must only write to per-chunk state so
// results are independent of scheduling.
void parallel_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& fn);

}  // namespace euaf
