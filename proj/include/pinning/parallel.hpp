// Deterministic index-parallel loop. Each index writes its own output slot
// and derives its own RNG stream, so results do not depend on the worker
// count. PINNING_WORKERS overrides the default (hardware concurrency).
#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace pinning {

inline int worker_count() {
    if (const char* env = std::getenv("PINNING_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? int(hw) : 1;
}

template <class F>
void parallel_for(int n, F&& body) {
    const int workers = worker_count() < n ? worker_count() : n;
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (std::thread& t : pool) t.join();
}

}  // namespace pinning
