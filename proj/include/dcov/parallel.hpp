#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace dcov {

// Static partition of [0, count) across up to max_threads workers.
// Each index is processed exactly once; callers that write only to
// per-index slots get results independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t count, int max_threads, Fn&& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::size_t nthreads = max_threads <= 0
                               ? hw
                               : static_cast<std::size_t>(max_threads);
    nthreads = std::min<std::size_t>(nthreads, count);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(nthreads);
    const std::size_t chunk = (count + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace dcov
