#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace hoqmc {

// Compensated (Kahan) accumulator. The caller fixes the summation order;
// compensation only removes the O(n) rounding drift.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Fixed block length used by all deterministic reductions. Point sums are
// accumulated per block (Kahan inside a block, blocks combined in index
// order), so results do not depend on the worker thread count.
inline constexpr std::size_t kSumBlock = 512;

inline std::size_t block_count(std::size_t n) {
    return (n + kSumBlock - 1) / kSumBlock;
}

// Runs fn(i) for i in [0, n). Work items are dealt round-robin to the
// workers; fn must write only to its own slot of any shared output.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
    if (threads < 1) threads = 1;
    std::size_t nthreads = std::min<std::size_t>(threads, n);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([t, n, nthreads, &fn] {
            for (std::size_t i = t; i < n; i += nthreads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Deterministic sum of f(i) over [0, n): blocked Kahan, fixed order.
template <class F>
double blocked_sum(std::size_t n, F&& f) {
    Kahan total;
    for (std::size_t b0 = 0; b0 < n; b0 += kSumBlock) {
        std::size_t b1 = std::min(n, b0 + kSumBlock);
        Kahan blk;
        for (std::size_t i = b0; i < b1; ++i) blk.add(f(i));
        total.add(blk.value());
    }
    return total.value();
}

inline std::uint64_t ipow_u64(std::uint64_t base, unsigned exp) {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (base != 0 && r > UINT64_MAX / base)
            throw std::overflow_error("ipow_u64: overflow");
        r *= base;
    }
    return r;
}

inline bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// FNV-1a, used to fingerprint serialized artifacts in reports.
inline std::uint64_t fnv1a(const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace hoqmc
