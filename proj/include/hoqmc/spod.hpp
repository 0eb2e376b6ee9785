#pragma once

// Smoothness-driven product and order dependent (SPOD) weights.
// For a finite index set u the set weight is
//   gamma_u = sum_{nu in {1..alpha}^{|u|}} |nu|! prod_{j in u} 2^{[nu_j==alpha]} beta_j^{nu_j},
// with gamma_{} = 1.

#include <cstdint>
#include <vector>

namespace hoqmc {

struct SPODWeightSpec {
    int alpha = 1;
    std::vector<double> beta;  // non-increasing positive prefix (beta_1, ...)

    // Throws unless alpha >= 1 and beta is positive and non-increasing.
    void validate() const;
};

// gamma_u for u given as 1-based dimension indices. Throws if an index
// falls outside the stored beta prefix.
double spod_set_weight(const std::vector<int>& u, const SPODWeightSpec& spec);

namespace detail {
// l! / (l-nu)! as exact doubles, indexed [l][nu]; used to run the weight
// and criterion recursions on factorial-scaled state without overflow.
std::vector<std::vector<double>> falling_factorial_table(int lmax, int numax);
}  // namespace detail

}  // namespace hoqmc
