#pragma once
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace skyrm {

// Fixed-tree pairwise reduction: the summation order depends only on the
// element count, never on scheduling, so totals are bit-reproducible for any
// worker count.
template <typename Real>
Real pairwise_sum(const Real* v, std::size_t n) {
    if (n == 0) return Real(0);
    if (n <= 8) {
        Real acc = v[0];
        for (std::size_t i = 1; i < n; ++i) acc += v[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

template <typename Real>
Real pairwise_sum(const std::vector<Real>& v) {
    return pairwise_sum(v.data(), v.size());
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index owns its
// output slot, so the result is identical for any thread count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int nw = int(std::min<std::size_t>(std::size_t(threads), n));
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(nw));
    for (int w = 0; w < nw; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = std::size_t(w); i < n; i += std::size_t(nw)) fn(i);
        });
    for (auto& t : pool) t.join();
}

// 17 significant digits: lossless text round trip for binary64.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace skyrm
