#pragma once

#include <cstddef>
#include <functional>

namespace ue {

// Worker count for evaluation loops: UE_PROBE_THREADS when set to a positive
// integer, otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t evaluation_threads();

// Runs body(chunk) for chunk in [0, n_chunks) on up to `threads` workers.
// Chunks are claimed dynamically, so bodies must write only chunk-owned
// output; results are then independent of the thread count. The first
// exception thrown by a body is rethrown after all workers join.
void parallel_chunks(std::size_t n_chunks, std::size_t threads,
                     const std::function<void(std::size_t)>& body);

}  // namespace ue
