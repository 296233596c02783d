#ifndef DYNABG_PARALLEL_HPP
#define DYNABG_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace dynabg {

// Worker cap: hardware concurrency, clamped by DYNABG_THREADS when set.
int worker_count();

// Runs fn(i) for i in [0, n) across worker threads; fn must be safe to
// call concurrently for distinct i. Falls back to a plain loop when only
// one worker is available.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dynabg

#endif
