#pragma once

// Exact univariate polynomial arithmetic over a prime field F_b, plus the
// Laurent-series digit extraction that drives polynomial lattice point
// generation. Degrees stay small (moduli of degree <= 20), so everything
// is schoolbook; no attempt at asymptotically fast multiplication.

#include <cstdint>
#include <vector>

namespace hoqmc {

class PolyFb {
public:
    // Degree reported for the zero polynomial (stands in for -infinity).
    static constexpr int kZeroDegree = -1;

    PolyFb() : base_(2) {}  // zero polynomial over F_2
    explicit PolyFb(std::uint32_t base);
    PolyFb(std::uint32_t base, std::vector<std::uint8_t> coeffs);

    // Integer encoding: coefficient of x^i <-> digit i of a base-b integer,
    // e.g. b=2, x^2+x+1 <-> 7. Used by all file formats and CLI flags.
    static PolyFb from_int(std::uint32_t base, std::uint64_t code);
    std::uint64_t to_int() const;

    std::uint32_t base() const { return base_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    bool is_one() const { return coeffs_.size() == 1 && coeffs_[0] == 1; }

    // Coefficient of x^i; zero beyond the degree.
    std::uint8_t coeff(std::size_t i) const {
        return i < coeffs_.size() ? coeffs_[i] : 0;
    }
    const std::vector<std::uint8_t>& coeffs() const { return coeffs_; }

    friend bool operator==(const PolyFb& a, const PolyFb& b) {
        return a.base_ == b.base_ && a.coeffs_ == b.coeffs_;
    }
    friend bool operator!=(const PolyFb& a, const PolyFb& b) { return !(a == b); }

private:
    std::uint32_t base_;
    std::vector<std::uint8_t> coeffs_;  // canonical: no trailing zeros

    void trim();
};

PolyFb poly_add(const PolyFb& a, const PolyFb& c);
PolyFb poly_sub(const PolyFb& a, const PolyFb& c);
PolyFb poly_mul(const PolyFb& a, const PolyFb& c);

// Quotient and remainder of a by p, deg(rem) < deg(p). p must be nonzero.
void poly_divmod(const PolyFb& a, const PolyFb& p, PolyFb* quot, PolyFb* rem);

// (a*c) mod p, canonical, degree < deg(p). Throws on base mismatch or a
// modulus of degree < 1.
PolyFb poly_mul_mod(const PolyFb& a, const PolyFb& c, const PolyFb& p);

PolyFb poly_gcd(const PolyFb& a, const PolyFb& c);

// Trial division against all monic polynomials of degree <= deg(p)/2.
// Throws for constant input.
bool is_irreducible(const PolyFb& p);

// Irreducible polynomial of the given degree with the smallest integer
// encoding. Results for b=2 up to degree 20 are cached after first use.
PolyFb first_irreducible(std::uint32_t base, int degree);

// First w coefficients (u_1, ..., u_w) of the expansion
//   n(x) q(x) / p(x) = sum_{l>=1} u_l x^{-l},
// i.e. the base-b digits of the lattice coordinate sum_l u_l b^{-l}.
// Preconditions checked: deg(n) < deg(p), deg(q) < deg(p), p irreducible.
std::vector<std::uint8_t> laurent_digits(const PolyFb& n, const PolyFb& q,
                                         const PolyFb& p, int w);

namespace detail {
// Same expansion without the (costly) irreducibility re-check; digits are
// returned packed as sum_l u_l b^{w-l} in [0, b^w).
std::uint64_t laurent_digits_packed(const PolyFb& n, const PolyFb& q,
                                    const PolyFb& p, int w);
}  // namespace detail

}  // namespace hoqmc
