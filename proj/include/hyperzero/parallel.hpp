#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace hyperzero {

/// Thread count from HYPERZERO_THREADS, or 1 when unset or unparsable.
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers. Bodies must write
/// only to their own output slot, so results do not depend on scheduling. The
/// first failure stops the remaining work; the exception from the lowest
/// failing index is rethrown.
template <class Body>
void for_each_trial(std::size_t n, unsigned threads, Body&& body)
{
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex mutex;
    std::size_t failed_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr failure;

    auto worker = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            std::size_t const i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
                stop = true;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        unsigned const count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace hyperzero
