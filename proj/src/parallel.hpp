#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ensheat::detail {

// Runs fn(i) for i in [0, count). Items are independent; each index is
// handled by exactly one worker so results do not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    const auto workers = static_cast<std::size_t>(std::max(1u, threads));
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    const auto used = std::min(workers, count);
    pool.reserve(used);
    for (std::size_t w = 0; w < used; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += used)
                    fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    pool.clear();
    if (error)
        std::rethrow_exception(error);
}

} // namespace ensheat::detail
