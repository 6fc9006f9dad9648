#pragma once

#include <cstddef>
#include <functional>

namespace sturmian {

// STURMIAN_THREADS caps the pool; otherwise hardware concurrency.
unsigned default_thread_count();

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
// Work is claimed dynamically; callers write into slot i so results stay ordered.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

}  // namespace sturmian
