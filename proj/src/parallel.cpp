#include "wkam/parallel.hpp"

#include <atomic>

namespace wkam {

namespace {
std::atomic<int> g_threads{0};
}

int parallel_threads() {
    int n = g_threads.load();
    if (n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_parallel_threads(int n) { g_threads.store(n); }

} // namespace wkam
