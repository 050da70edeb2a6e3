#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace wkam {

/// Process-wide worker count used by parallel_for. 0 means "hardware".
int parallel_threads();
void set_parallel_threads(int n);

/// Static partition of [0, n) over worker threads. Each index is visited by
/// exactly one thread, so writes to disjoint slots need no synchronization
/// and results do not depend on the thread count.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    int workers = std::min(parallel_threads(), n);
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([=]() {
            for (int i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace wkam
