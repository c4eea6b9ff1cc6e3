#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace dsmdot {

// Thread count resolution: explicit argument > DSMDOT_THREADS > hardware.
inline int resolve_threads(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("DSMDOT_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Block-partitioned parallel for over [0, n). fn(begin, end) per block.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n < 2) {
        fn(0, n);
        return;
    }
    std::size_t nt = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::size_t chunk = (n + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
        std::size_t b = t * chunk;
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

} // namespace dsmdot
