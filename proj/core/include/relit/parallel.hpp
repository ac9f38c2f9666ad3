// Copyright 2026 The Relit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace relit {

/// Process-wide worker count. 0 means "use hardware_concurrency".
/// The CLI sets this once from --threads before doing any work.
inline int& thread_count() {
    static int n = 0;
    return n;
}

inline int effective_threads() {
    int n = thread_count();
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, n);
}

/// Static block partition of [0, n). Each index is handled by exactly one
/// worker and workers write disjoint outputs, so results are identical to
/// a serial run regardless of the worker count.
inline void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& body) {
    int workers = effective_threads();
    if (workers <= 1 || n < 256) {
        body(0, n);
        return;
    }
    workers = static_cast<int>(std::min<int64_t>(workers, n));
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    int64_t chunk = (n + workers - 1) / workers;
    for (int w = 1; w < workers; ++w) {
        int64_t lo = w * chunk;
        int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    body(0, std::min(n, chunk));
    for (auto& t : pool) t.join();
}

}  // namespace relit
