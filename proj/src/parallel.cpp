#include "ksne/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace ksne {

namespace {

std::atomic<int> global_threads{1};
thread_local int local_threads = 0;

}  // namespace

int thread_count() {
    return local_threads > 0 ? local_threads : global_threads.load();
}

void set_thread_count(int threads) {
    global_threads.store(std::max(threads, 1));
}

ThreadScope::ThreadScope(int threads) : previous_(local_threads) {
    local_threads = std::max(threads, 1);
}

ThreadScope::~ThreadScope() {
    local_threads = previous_;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk) {
    if (n == 0) {
        return;
    }
    const std::size_t by_grain = std::max<std::size_t>(1, n / std::max<std::size_t>(min_chunk, 1));
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), by_grain);
    if (workers <= 1) {
        body(0, n);
        return;
    }

    // One slot per chunk; the lowest failing chunk wins so errors are
    // reproducible across worker counts.
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);

    auto run_chunk = [&](std::size_t w) {
        ThreadScope scope(1);
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        try {
            body(begin, end);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(run_chunk, w);
    }
    run_chunk(0);
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
}

}  // namespace ksne
