#include "hoqmc/walsh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hoqmc/util.hpp"

namespace hoqmc {

std::uint64_t dick_weight(std::uint64_t k, int alpha, std::uint32_t base) {
    if (alpha < 1) throw std::invalid_argument("dick_weight: alpha must be >= 1");
    if (base < 2) throw std::invalid_argument("dick_weight: base must be >= 2");
    // Digit positions of k, most significant first.
    std::vector<std::uint64_t> pos;
    std::uint64_t a = 1;
    while (k) {
        if (k % base) pos.push_back(a);
        k /= base;
        ++a;
    }
    std::uint64_t sum = 0;
    int take = std::min<std::size_t>(alpha, pos.size());
    for (int i = 0; i < take; ++i) sum += pos[pos.size() - 1 - i];
    return sum;
}

std::complex<double> walsh_eval(std::uint64_t k, std::uint64_t numerator,
                                int ndigits, std::uint32_t base) {
    if (ndigits < 0) throw std::invalid_argument("walsh_eval: ndigits < 0");
    if (ndigits > 0 && numerator >= ipow_u64(base, ndigits))
        throw std::invalid_argument("walsh_eval: numerator out of range");
    // Exponent of zeta = exp(2*pi*i/b): sum of kappa_a * xi_a over digit
    // positions; xi_a is digit a of x (most significant first), kappa_a is
    // digit a of k (least significant first).
    std::uint64_t e = 0;
    std::uint64_t x = numerator;
    for (int a = ndigits; a >= 1 && k; --a) {
        std::uint64_t xi = x % base;
        x /= base;
        // digit of k at position a
        std::uint64_t kk = k;
        for (int i = 1; i < a; ++i) kk /= base;
        e += (kk % base) * xi;
    }
    e %= base;
    if (base == 2) return {e ? -1.0 : 1.0, 0.0};
    double ang = 2.0 * std::numbers::pi * static_cast<double>(e) / base;
    return {std::cos(ang), std::sin(ang)};
}

double walsh_kernel(std::uint64_t numerator, int alpha, int m, std::uint32_t base) {
    if (alpha < 1 || m < 1)
        throw std::invalid_argument("walsh_kernel: need alpha >= 1 and m >= 1");
    int nd = alpha * m;
    std::uint64_t scale = ipow_u64(base, nd);
    if (numerator >= scale)
        throw std::invalid_argument("walsh_kernel: coordinate outside [0,1)");

    // b^{-a} for a = 1..alpha*m.
    std::vector<double> bneg(nd + 1);
    bneg[0] = 1.0;
    for (int a = 1; a <= nd; ++a) bneg[a] = bneg[a - 1] / base;

    std::vector<double> v(alpha + 1, 0.0);
    v[0] = 1.0;
    std::uint64_t x = numerator;
    for (int a = nd; a >= 1; --a) {  // least significant digit of x first
        std::uint64_t xi = x % base;
        x /= base;
        double ga = xi == 0 ? double(base - 1) : -1.0;
        detail::kernel_step(v.data(), alpha, ga * bneg[a], ga);
    }
    return detail::kernel_finish(v.data(), alpha);
}

}  // namespace hoqmc
