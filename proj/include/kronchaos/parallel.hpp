#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kronchaos {

/// Calls body(begin, end) over fixed-size chunks of [0, count). Chunk
/// boundaries do not depend on the worker count, so any body that writes only
/// to its own slots produces identical results for every `threads` value.
template <typename Body>
void parallel_for(std::size_t count, std::size_t chunk, unsigned threads, Body&& body)
{
    if (count == 0) {
        return;
    }
    chunk = std::max<std::size_t>(chunk, 1);
    const std::size_t chunks = (count + chunk - 1) / chunk;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1u), chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            body(c * chunk, std::min(count, (c + 1) * chunk));
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < chunks; c = next++) {
                try {
                    body(c * chunk, std::min(count, (c + 1) * chunk));
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace kronchaos
