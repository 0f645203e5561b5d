#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hawkesboot {

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
///
/// Work items pull indices from a shared counter; every item writes only to
/// its own slot in caller-owned storage, so results do not depend on the
/// scheduling and a run is reproducible for any thread count.
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) {
        return;
    }
    if (threads <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                break;
            }
            try {
                fn(i);
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(count));
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace hawkesboot
