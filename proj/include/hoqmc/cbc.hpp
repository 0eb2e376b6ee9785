#pragma once

// Component-by-component construction of interlaced polynomial lattice
// rules under SPOD weights.
//
// The figure of merit for a prefix of j parametric dimensions with
// interlaced coordinates x_n^{(1..j)} is
//
//   E = (1/N) sum_n sum_{l=1}^{alpha*j} l! Q_{j,l,n},
//   Q_{r,l,n} = Q_{r-1,l,n}
//             + omega_{alpha,m}(x_n^{(r)}) * sum_{nu=1}^{min(l,alpha)}
//               2^{[nu==alpha]} beta_r^nu Q_{r-1,l-nu,n},
//
// i.e. the point-sum expansion of sum_{u != {}} gamma_u prod_{r in u}
// omega(x^{(r)}) under SPOD weights. The implementation carries
// R_{r,l} = l! Q_{r,l} so no factorial is ever materialized.
//
// The search fixes gen[1] = 1 and then, for each underlying dimension in
// order, scores every nonzero polynomial of degree < m and keeps the
// minimizer (ties broken by smallest integer encoding). Scoring is
// O(candidates x N) per step; candidate kernels share the digit DP across
// common digit prefixes, which changes no arithmetic, only reuse.

#include <cstdint>
#include <vector>

#include "hoqmc/rule.hpp"
#include "hoqmc/spod.hpp"

namespace hoqmc {

// Criterion for a prefix: columns[r][n] are interlaced numerators of
// parametric dimension r+1 (a partially interlaced last dimension is
// allowed mid-construction). weights.beta must cover all columns.
double cbc_criterion(const std::vector<std::vector<std::uint64_t>>& columns,
                     int alpha, int m, std::uint32_t b,
                     const SPODWeightSpec& weights);

struct CbcOptions {
    int threads = 1;
    // Candidate scores: 0 = auto, 1 = per-candidate evaluation,
    // 2 = shared-prefix batched evaluation. Both produce bit-identical
    // scores; auto picks by problem size.
    int score_mode = 0;
};

// Greedy construction for the given sizes; weights.beta must cover s
// dimensions. Deterministic for any thread count.
InterlacedRuleSpec cbc_construct(std::uint32_t b, int m, int alpha, int s,
                                 const SPODWeightSpec& weights,
                                 const CbcOptions& opts = {});

}  // namespace hoqmc
