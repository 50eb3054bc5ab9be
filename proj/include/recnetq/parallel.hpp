#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace recnetq {

/// Number of workers used when a caller passes 0.
inline unsigned default_workers()
{
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/**
 * Split [0, count) into `workers` contiguous chunks and run
 * body(chunk_index, begin, end) on each. Chunk boundaries depend only on
 * count and the chunk count, so callers that reduce per-chunk results in
 * chunk order get the same answer for any worker count as long as the
 * per-item work is independent.
 */
template <typename Body>
void parallel_chunks(std::size_t count, unsigned workers, Body&& body)
{
    if (workers == 0) workers = default_workers();
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, count));
    if (chunks == 1) {
        body(std::size_t{0}, std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(chunks);
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t begin = count * c / chunks;
        const std::size_t end = count * (c + 1) / chunks;
        pool.emplace_back([&, c, begin, end] {
            try {
                body(c, begin, end);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace recnetq
