#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace fishpose {

/// Splits [0, count) into contiguous chunks, one per worker thread, and runs
/// fn(begin, end) on each. Output written by fn must be disjoint per index so
/// results do not depend on the worker count.
template <typename Fn>
void parallelFor(int count, int workers, Fn&& fn) {
    workers = std::clamp(workers, 1, std::max(1, count));
    if (workers == 1) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace fishpose
