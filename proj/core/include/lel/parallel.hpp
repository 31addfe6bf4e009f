#pragma once

#include <cstddef>
#include <functional>

namespace lel {

// Worker cap: LEL_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, count). Each index writes only its own slot, so
// results are order-deterministic. The exception from the lowest failing
// index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace lel
