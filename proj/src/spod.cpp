#include "hoqmc/spod.hpp"

#include <stdexcept>

namespace hoqmc {

void SPODWeightSpec::validate() const {
    if (alpha < 1) throw std::invalid_argument("SPODWeightSpec: alpha must be >= 1");
    for (std::size_t j = 0; j < beta.size(); ++j) {
        if (!(beta[j] > 0.0))
            throw std::invalid_argument("SPODWeightSpec: beta must be positive");
        if (j && beta[j] > beta[j - 1])
            throw std::invalid_argument("SPODWeightSpec: beta must be non-increasing");
    }
}

namespace detail {

std::vector<std::vector<double>> falling_factorial_table(int lmax, int numax) {
    std::vector<std::vector<double>> t(lmax + 1, std::vector<double>(numax + 1, 0.0));
    for (int l = 0; l <= lmax; ++l) {
        t[l][0] = 1.0;
        for (int nu = 1; nu <= numax; ++nu)
            t[l][nu] = l - nu + 1 >= 1 ? t[l][nu - 1] * (l - nu + 1) : 0.0;
    }
    return t;
}

}  // namespace detail

double spod_set_weight(const std::vector<int>& u, const SPODWeightSpec& spec) {
    spec.validate();
    for (int j : u)
        if (j < 1 || static_cast<std::size_t>(j) > spec.beta.size())
            throw std::out_of_range("spod_set_weight: index outside stored beta prefix");

    if (u.empty()) return 1.0;
    int alpha = spec.alpha;
    int lmax = alpha * static_cast<int>(u.size());
    auto ffall = detail::falling_factorial_table(lmax, alpha);

    // G[l] = l! * sum over nu-prefixes with |nu| = l of prod 2^[nu_j==alpha] beta^nu.
    std::vector<double> g(lmax + 1, 0.0);
    g[0] = 1.0;
    for (int j : u) {
        double beta = spec.beta[j - 1];
        std::vector<double> coef(alpha + 1);
        double bp = 1.0;
        for (int nu = 1; nu <= alpha; ++nu) {
            bp *= beta;
            coef[nu] = (nu == alpha ? 2.0 : 1.0) * bp;
        }
        for (int l = lmax; l >= 1; --l) {
            double acc = 0.0;
            for (int nu = 1; nu <= std::min(l, alpha); ++nu)
                acc += coef[nu] * ffall[l][nu] * g[l - nu];
            g[l] = acc;  // no skip term: every j in u carries nu_j >= 1
        }
        g[0] = 0.0;
    }
    double total = 0.0;
    for (int l = 1; l <= lmax; ++l) total += g[l];
    return total;
}

}  // namespace hoqmc
