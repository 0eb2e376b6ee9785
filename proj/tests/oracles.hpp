#pragma once

// Independent test oracles. Everything here is deliberately naive
// (schoolbook long division, direct enumeration) and shares no code with
// the implementation paths it checks.

#include <cstdint>
#include <vector>

#include "hoqmc/gfpoly.hpp"
#include "hoqmc/util.hpp"

namespace oracle {

// Coefficients as plain vectors, index i = coefficient of x^i.
using Coeffs = std::vector<int>;

inline Coeffs trim(Coeffs c) {
    while (!c.empty() && c.back() == 0) c.pop_back();
    return c;
}

inline Coeffs mul(const Coeffs& a, const Coeffs& b, int q) {
    if (a.empty() || b.empty()) return {};
    Coeffs out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] = (out[i + j] + a[i] * b[j]) % q;
    return trim(out);
}

// Long division: a = quot * p + rem with deg(rem) < deg(p).
inline void divmod(Coeffs a, const Coeffs& p, int q, Coeffs* quot, Coeffs* rem) {
    Coeffs qq(a.size() > p.size() ? a.size() - p.size() + 1 : 1, 0);
    int dp = static_cast<int>(p.size()) - 1;
    // inverse of the leading coefficient by brute force
    int inv = 1;
    for (int t = 1; t < q; ++t)
        if (p[dp] * t % q == 1) inv = t;
    for (int i = static_cast<int>(a.size()) - 1; i >= dp; --i) {
        if (a[i] == 0) continue;
        int f = a[i] * inv % q;
        qq[i - dp] = f;
        for (int j = 0; j <= dp; ++j) a[i - dp + j] = ((a[i - dp + j] - f * p[j]) % q + q) % q;
    }
    if (quot) *quot = trim(qq);
    if (rem) {
        a.resize(dp > 0 ? dp : 0);
        *rem = trim(a);
    }
}

inline Coeffs from_poly(const hoqmc::PolyFb& p) {
    Coeffs c(p.coeffs().begin(), p.coeffs().end());
    return c;
}

inline hoqmc::PolyFb to_poly(std::uint32_t base, const Coeffs& c) {
    std::vector<std::uint8_t> cc(c.begin(), c.end());
    return hoqmc::PolyFb(base, std::move(cc));
}

// Laurent digits of n*q/p by one long division of n*q*x^w by p: the digit
// u_l is the coefficient of x^{w-l} of the quotient.
inline std::vector<int> laurent(const Coeffs& n, const Coeffs& qpoly, const Coeffs& p,
                                int w, int base) {
    Coeffs shifted = mul(n, qpoly, base);
    shifted.insert(shifted.begin(), w, 0);
    Coeffs quot;
    divmod(shifted, p, base, &quot, nullptr);
    std::vector<int> digits(w, 0);
    for (int l = 1; l <= w; ++l) {
        int idx = w - l;
        digits[l - 1] = idx < static_cast<int>(quot.size()) ? quot[idx] : 0;
    }
    return digits;
}

// Irreducibility by exhaustive search for a factor pair.
inline bool irreducible(const Coeffs& p, int base) {
    int d = static_cast<int>(p.size()) - 1;
    if (d < 1) return false;
    for (int k = 1; 2 * k <= d; ++k) {
        std::uint64_t lo = hoqmc::ipow_u64(base, k), hi = hoqmc::ipow_u64(base, k + 1);
        for (std::uint64_t enc = lo; enc < hi; ++enc) {
            Coeffs div;
            std::uint64_t e = enc;
            while (e) {
                div.push_back(static_cast<int>(e % base));
                e /= base;
            }
            Coeffs rem;
            divmod(p, div, base, nullptr, &rem);
            if (rem.empty()) return false;
        }
    }
    return true;
}

}  // namespace oracle
