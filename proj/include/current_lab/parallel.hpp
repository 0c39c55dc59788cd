#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace current_lab {

/// Thread count from CURRENT_LAB_THREADS, else the hardware concurrency.
std::size_t default_thread_count();

/// Fixed-size worker pool for replica loops. Work items are independent and
/// write to their own slots, so results never depend on the thread count.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t threads = default_thread_count())
        : threads_(threads == 0 ? 1 : threads) {}

    std::size_t threads() const { return threads_; }

    template <class F>
    void parallel_for(std::size_t n, F&& body) const {
        const std::size_t workers = std::min(threads_, n);
        if (workers <= 1) {
            for (std::size_t i = 0; i < n; ++i) body(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        constexpr std::size_t chunk = 64;
        auto work = [&] {
            try {
                for (;;) {
                    const std::size_t begin = next.fetch_add(chunk);
                    if (begin >= n) return;
                    const std::size_t end = std::min(n, begin + chunk);
                    for (std::size_t i = begin; i < end; ++i) body(i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
            }
        };
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
        pool.clear();
        if (failure) std::rethrow_exception(failure);
    }

    /// Evaluates fn(i) for every replica i and returns the results in index order.
    template <class T, class F>
    std::vector<T> map(std::size_t n, F&& fn) const {
        std::vector<T> out(n);
        parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
        return out;
    }

private:
    std::size_t threads_;
};

}  // namespace current_lab
