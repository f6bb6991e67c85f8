#ifndef KSNE_PARALLEL_HPP
#define KSNE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace ksne {

/// Worker count used by parallel_for on the calling thread. Defaults to 1.
int thread_count();

/// Sets the process-wide default worker count (values < 1 mean 1).
void set_thread_count(int threads);

/// Overrides the worker count for the current thread while in scope. Grid
/// sweeps use this to run each cell single-threaded.
class ThreadScope {
public:
    explicit ThreadScope(int threads);
    ~ThreadScope();
    ThreadScope(const ThreadScope&) = delete;
    ThreadScope& operator=(const ThreadScope&) = delete;

private:
    int previous_;
};

/**
 * Runs `body(begin, end)` over contiguous chunks of [0, n).
 *
 * Chunks never overlap, so bodies that only write to slots owned by their
 * index range produce results independent of the worker count. Reductions
 * must be done by the caller in index order after the call returns.
 */
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 16);

}  // namespace ksne

#endif
