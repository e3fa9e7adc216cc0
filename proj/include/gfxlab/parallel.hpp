#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace gfx {

/// Replicate-level parallelism with thread-count-independent results: items
/// are processed in fixed-size chunks, each chunk reduced by its worker, and
/// the caller receives the chunk results in chunk order.  Per-item RNG
/// streams are derived from the item index, so totals depend only on the
/// seed.
template <typename Partial, typename Worker>
std::vector<Partial> run_chunked(std::size_t n_items, std::size_t chunk_size, int threads,
                                 Worker worker) {
    const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
    std::vector<Partial> results(n_chunks);
    if (threads <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            const std::size_t lo = c * chunk_size;
            const std::size_t hi = std::min(lo + chunk_size, n_items);
            results[c] = worker(lo, hi);
        }
        return results;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&]() {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            const std::size_t lo = c * chunk_size;
            const std::size_t hi = std::min(lo + chunk_size, n_items);
            results[c] = worker(lo, hi);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    return results;
}

} // namespace gfx
