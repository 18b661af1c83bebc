#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace tilesub {

/// Worker count for `requested` (0 = hardware concurrency).
inline int resolve_threads(int requested)
{
    if (requested > 0) {
        return requested;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Calls fn(chunk, begin, end) on `threads` contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and threads, so per-chunk partial results reduce deterministically.
template <typename Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn)
{
    const auto t = static_cast<std::size_t>(std::max(1, threads));
    if (t == 1 || n < 2) {
        fn(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t step = (n + t - 1) / t;
    for (std::size_t c = 0; c < t; ++c) {
        const std::size_t begin = std::min(n, c * step);
        const std::size_t end = std::min(n, begin + step);
        pool.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
    }
    for (auto& th : pool) {
        th.join();
    }
}

} // namespace tilesub
