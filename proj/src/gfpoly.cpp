#include "hoqmc/gfpoly.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include "hoqmc/util.hpp"

namespace hoqmc {

namespace {

void check_base(std::uint32_t base) {
    if (base < 2 || base > 251 || !is_prime_u32(base))
        throw std::invalid_argument("PolyFb: base must be a prime in [2, 251]");
}

void check_same_base(const PolyFb& a, const PolyFb& b, const char* op) {
    if (a.base() != b.base())
        throw std::invalid_argument(std::string(op) + ": base mismatch");
}

// Multiplicative inverse in F_b via Fermat (b prime, small).
std::uint32_t inv_mod(std::uint32_t a, std::uint32_t b) {
    std::uint32_t r = 1, e = b - 2, x = a % b;
    while (e) {
        if (e & 1) r = r * x % b;
        x = x * x % b;
        e >>= 1;
    }
    return r;
}

}  // namespace

PolyFb::PolyFb(std::uint32_t base) : base_(base) { check_base(base); }

PolyFb::PolyFb(std::uint32_t base, std::vector<std::uint8_t> coeffs)
    : base_(base), coeffs_(std::move(coeffs)) {
    check_base(base);
    for (auto c : coeffs_)
        if (c >= base_)
            throw std::invalid_argument("PolyFb: coefficient out of range");
    trim();
}

void PolyFb::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

PolyFb PolyFb::from_int(std::uint32_t base, std::uint64_t code) {
    check_base(base);
    std::vector<std::uint8_t> c;
    while (code) {
        c.push_back(static_cast<std::uint8_t>(code % base));
        code /= base;
    }
    return PolyFb(base, std::move(c));
}

std::uint64_t PolyFb::to_int() const {
    std::uint64_t v = 0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) {
        if (v > (UINT64_MAX - coeffs_[i]) / base_)
            throw std::overflow_error("PolyFb::to_int: encoding overflow");
        v = v * base_ + coeffs_[i];
    }
    return v;
}

PolyFb poly_add(const PolyFb& a, const PolyFb& c) {
    check_same_base(a, c, "poly_add");
    std::uint32_t b = a.base();
    std::vector<std::uint8_t> out(std::max(a.coeffs().size(), c.coeffs().size()));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>((a.coeff(i) + c.coeff(i)) % b);
    return PolyFb(b, std::move(out));
}

PolyFb poly_sub(const PolyFb& a, const PolyFb& c) {
    check_same_base(a, c, "poly_sub");
    std::uint32_t b = a.base();
    std::vector<std::uint8_t> out(std::max(a.coeffs().size(), c.coeffs().size()));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>((a.coeff(i) + b - c.coeff(i)) % b);
    return PolyFb(b, std::move(out));
}

PolyFb poly_mul(const PolyFb& a, const PolyFb& c) {
    check_same_base(a, c, "poly_mul");
    std::uint32_t b = a.base();
    if (a.is_zero() || c.is_zero()) return PolyFb(b);
    std::vector<std::uint32_t> acc(a.coeffs().size() + c.coeffs().size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs().size(); ++i)
        for (std::size_t j = 0; j < c.coeffs().size(); ++j)
            acc[i + j] = (acc[i + j] + a.coeffs()[i] * c.coeffs()[j]) % b;
    std::vector<std::uint8_t> out(acc.begin(), acc.end());
    return PolyFb(b, std::move(out));
}

void poly_divmod(const PolyFb& a, const PolyFb& p, PolyFb* quot, PolyFb* rem) {
    check_same_base(a, p, "poly_divmod");
    if (p.is_zero()) throw std::invalid_argument("poly_divmod: zero modulus");
    std::uint32_t b = a.base();
    int dp = p.degree();
    std::vector<std::uint8_t> r(a.coeffs());
    std::vector<std::uint8_t> q(a.degree() >= dp ? a.degree() - dp + 1 : 0, 0);
    std::uint32_t lead_inv = inv_mod(p.coeff(dp), b);
    for (int i = static_cast<int>(r.size()) - 1; i >= dp; --i) {
        if (r[i] == 0) continue;
        std::uint32_t f = r[i] * lead_inv % b;
        q[i - dp] = static_cast<std::uint8_t>(f);
        for (int j = 0; j <= dp; ++j) {
            std::uint32_t sub = f * p.coeff(j) % b;
            r[i - dp + j] = static_cast<std::uint8_t>((r[i - dp + j] + b - sub) % b);
        }
    }
    if (quot) *quot = PolyFb(b, std::move(q));
    if (rem) {
        r.resize(std::min<std::size_t>(r.size(), dp));
        *rem = PolyFb(b, std::move(r));
    }
}

PolyFb poly_mul_mod(const PolyFb& a, const PolyFb& c, const PolyFb& p) {
    check_same_base(a, c, "poly_mul_mod");
    check_same_base(a, p, "poly_mul_mod");
    if (p.degree() < 1)
        throw std::invalid_argument("poly_mul_mod: modulus must have degree >= 1");
    PolyFb rem(a.base());
    poly_divmod(poly_mul(a, c), p, nullptr, &rem);
    return rem;
}

PolyFb poly_gcd(const PolyFb& a, const PolyFb& c) {
    check_same_base(a, c, "poly_gcd");
    PolyFb x = a, y = c;
    while (!y.is_zero()) {
        PolyFb r(x.base());
        poly_divmod(x, y, nullptr, &r);
        x = y;
        y = r;
    }
    return x;
}

bool is_irreducible(const PolyFb& p) {
    if (p.degree() < 1)
        throw std::invalid_argument("is_irreducible: constant polynomial");
    int d = p.degree();
    std::uint32_t b = p.base();
    // Monic divisor candidates of degree k are encoded as b^k + t, t < b^k.
    for (int k = 1; 2 * k <= d; ++k) {
        std::uint64_t lead = ipow_u64(b, k);
        for (std::uint64_t t = 0; t < lead; ++t) {
            PolyFb div = PolyFb::from_int(b, lead + t);
            PolyFb r(b);
            poly_divmod(p, div, nullptr, &r);
            if (r.is_zero()) return false;
        }
    }
    return true;
}

PolyFb first_irreducible(std::uint32_t base, int degree) {
    check_base(base);
    if (degree < 1)
        throw std::invalid_argument("first_irreducible: degree must be >= 1");
    if (base == 2 && degree > 20)
        throw std::invalid_argument("first_irreducible: degree > 20 unsupported for b=2");

    static std::mutex mu;
    static std::map<std::pair<std::uint32_t, int>, std::uint64_t> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({base, degree});
        if (it != cache.end()) return PolyFb::from_int(base, it->second);
    }
    std::uint64_t lo = ipow_u64(base, degree);
    std::uint64_t hi = ipow_u64(base, degree + 1);
    for (std::uint64_t code = lo; code < hi; ++code) {
        PolyFb cand = PolyFb::from_int(base, code);
        if (is_irreducible(cand)) {
            std::lock_guard<std::mutex> lock(mu);
            cache[{base, degree}] = code;
            return cand;
        }
    }
    throw std::runtime_error("first_irreducible: none found");  // unreachable
}

namespace detail {

std::uint64_t laurent_digits_packed(const PolyFb& n, const PolyFb& q,
                                    const PolyFb& p, int w) {
    std::uint32_t b = p.base();
    PolyFb g = poly_mul_mod(n, q, p);
    // Iterate r <- r*x mod p; the quotient digit of each step is the next
    // Laurent coefficient of g/p.
    int dp = p.degree();
    std::uint32_t lead_inv = inv_mod(p.coeff(dp), b);
    std::vector<std::uint32_t> r(dp, 0);
    for (int i = 0; i <= g.degree(); ++i) r[i] = g.coeff(i);
    std::uint64_t packed = 0;
    for (int l = 0; l < w; ++l) {
        // r <- r * x, then reduce the single overflowing term.
        std::uint32_t top = dp > 0 ? r[dp - 1] : 0;
        for (int i = dp - 1; i > 0; --i) r[i] = r[i - 1];
        if (dp > 0) r[0] = 0;
        std::uint32_t u = top * lead_inv % b;
        if (u)
            for (int i = 0; i < dp; ++i)
                r[i] = (r[i] + b - u * p.coeff(i) % b) % b;
        packed = packed * b + u;
    }
    return packed;
}

}  // namespace detail

std::vector<std::uint8_t> laurent_digits(const PolyFb& n, const PolyFb& q,
                                         const PolyFb& p, int w) {
    check_same_base(n, p, "laurent_digits");
    check_same_base(q, p, "laurent_digits");
    if (p.degree() < 1)
        throw std::invalid_argument("laurent_digits: constant modulus");
    if (!is_irreducible(p))
        throw std::invalid_argument("laurent_digits: reducible modulus");
    if (n.degree() >= p.degree() || q.degree() >= p.degree())
        throw std::invalid_argument("laurent_digits: numerator degree too large");
    if (w < 1) throw std::invalid_argument("laurent_digits: need w >= 1");

    std::uint64_t packed = detail::laurent_digits_packed(n, q, p, w);
    std::vector<std::uint8_t> out(w);
    for (int l = w - 1; l >= 0; --l) {
        out[l] = static_cast<std::uint8_t>(packed % p.base());
        packed /= p.base();
    }
    return out;
}

}  // namespace hoqmc
