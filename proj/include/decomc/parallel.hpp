// parallel.hpp - deterministic parallel map over an index range
//
// Worker count is capped by the DECOMC_THREADS environment variable.
// Results must be written into preallocated per-index slots; callers then
// reduce in index order, so the outcome is independent of the thread count.

#pragma once

#include <algorithm>
#include <cstdlib>
#include <cstddef>
#include <thread>
#include <vector>

namespace decomc {

inline unsigned worker_count(std::size_t n) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("DECOMC_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap > 0 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
    }
    return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(n, 1)));
}

// Calls body(i) for i in [0, n). body must only touch slot i of shared state.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const unsigned nw = worker_count(n);
    if (nw <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (unsigned w = 0; w < nw; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += nw) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace decomc
