#pragma once

#include <cstddef>
#include <functional>

namespace mide {

// Process-wide worker count. Defaults to MIDE_THREADS when set, else 1.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

// Runs body(i) for i in [begin, end) over contiguous static chunks. Each
// index is visited exactly once; callers write to index-owned slots only, so
// results never depend on the thread count. Nested calls run serially.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace mide
