#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace dfclrr {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Tasks must
/// write only to their own pre-assigned slots, which keeps results
/// independent of scheduling. The first exception is rethrown after join.
inline void parallel_for(std::size_t count, unsigned workers,
                         const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (workers <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

}  // namespace dfclrr
