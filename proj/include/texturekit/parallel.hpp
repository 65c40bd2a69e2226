#pragma once

#include <cstddef>
#include <functional>

namespace tk {

// Worker cap for parallel_for. 0 means hardware concurrency. The CLI sets
// this from --threads / TEXTUREKIT_THREADS.
void set_max_threads(int n);
int max_threads();

// Runs body(i) for i in [0, n). Work items must be independent; each writes
// only to its own output slot, which keeps results identical for any worker
// count. Nested calls from inside a worker run sequentially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tk
