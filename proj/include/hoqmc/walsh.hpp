#pragma once

// Dick weight, Walsh functions and the truncated higher-order kernel
//   omega_{alpha,m}(x) = sum_{k=1}^{b^{alpha m}-1} b^{-mu_alpha(k)} wal_k(x),
// evaluated by a digit dynamic program instead of the b^{alpha m}-term sum.

#include <complex>
#include <cstdint>

namespace hoqmc {

// mu_alpha(k): sum of the positions of the min(alpha, v) most significant
// nonzero base-b digits of k, where digit position a carries weight b^{a-1}
// in k. mu_alpha(0) = 0.
std::uint64_t dick_weight(std::uint64_t k, int alpha, std::uint32_t base);

// wal_k(x) for x = numerator / b^ndigits; returns a unit complex number
// (real +-1 when b = 2). wal_0 == 1.
std::complex<double> walsh_eval(std::uint64_t k, std::uint64_t numerator,
                                int ndigits, std::uint32_t base);

// omega_{alpha,m} at x = numerator / b^{alpha*m}. Exact up to rounding,
// O(alpha^2 m) time. Throws if the numerator is out of range.
double walsh_kernel(std::uint64_t numerator, int alpha, int m, std::uint32_t base);

namespace detail {

// Per-position kernel DP transition, shared by every evaluation path so
// that batched evaluations are bit-identical with walsh_kernel.
// State v[c], c = 0..alpha: partial sums with c nonzero frequency digits
// placed so far; positions are processed from a = alpha*m down to 1.
// fa = (digit==0 ? b-1 : -1) * b^{-a}, ga = (digit==0 ? b-1 : -1).
inline void kernel_step(double* v, int alpha, double fa, double ga) {
    double top = v[alpha] + v[alpha] * ga + v[alpha - 1] * fa;
    for (int c = alpha - 1; c >= 1; --c) v[c] += v[c - 1] * fa;
    v[alpha] = top;
}

inline double kernel_finish(const double* v, int alpha) {
    double s = 0.0;
    for (int c = 0; c <= alpha; ++c) s += v[c];
    return s - 1.0;  // drop the k = 0 term
}

}  // namespace detail

}  // namespace hoqmc
