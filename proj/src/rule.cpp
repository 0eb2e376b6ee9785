#include "hoqmc/rule.hpp"

#include <stdexcept>

#include "hoqmc/util.hpp"

namespace hoqmc {

std::uint64_t InterlacedRuleSpec::point_count() const {
    return ipow_u64(b, m);
}

void InterlacedRuleSpec::validate() const {
    if (m < 1) throw std::invalid_argument("rule: m must be >= 1");
    if (alpha < 1) throw std::invalid_argument("rule: alpha must be >= 1");
    if (s < 1) throw std::invalid_argument("rule: s must be >= 1");
    std::uint64_t denom = ipow_u64(b, alpha * m);
    if (denom > (1ull << 62))
        throw std::invalid_argument("rule: b^(alpha*m) exceeds the 62-bit coordinate budget");
    if (modulus.base() != b) throw std::invalid_argument("rule: modulus base mismatch");
    if (modulus.degree() != m)
        throw std::invalid_argument("rule: modulus degree must equal m");
    if (!is_irreducible(modulus))
        throw std::invalid_argument("rule: modulus must be irreducible");
    if (gen.size() != static_cast<std::size_t>(alpha) * s)
        throw std::invalid_argument("rule: need alpha*s generating polynomials");
    if (!gen[0].is_one())
        throw std::invalid_argument("rule: gen[0] must be the constant 1");
    for (const auto& g : gen) {
        if (g.base() != b) throw std::invalid_argument("rule: generator base mismatch");
        if (g.is_zero() || g.degree() >= m)
            throw std::invalid_argument("rule: generators must be nonzero with degree < m");
    }
}

std::uint64_t interlace(int alpha, std::uint32_t b, int m,
                        std::span<const std::uint64_t> numerators) {
    if (alpha < 1 || m < 1) throw std::invalid_argument("interlace: bad alpha or m");
    if (numerators.size() != static_cast<std::size_t>(alpha))
        throw std::invalid_argument("interlace: expected alpha inputs");
    std::uint64_t bound = ipow_u64(b, m);
    std::uint64_t z = 0;
    for (int i = 1; i <= alpha; ++i) {
        if (numerators[i - 1] >= bound)
            throw std::invalid_argument("interlace: input has more than m digits");
        z += detail::spread_slot(numerators[i - 1], alpha, b, m, i);
    }
    return z;
}

double interlace_values(int alpha, std::uint32_t b, int m,
                        std::span<const double> values) {
    std::vector<std::uint64_t> nums(values.size());
    double scale = static_cast<double>(ipow_u64(b, m));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0 || values[i] >= 1.0)
            throw std::invalid_argument("interlace_values: input outside [0,1)");
        double scaled = values[i] * scale;
        nums[i] = static_cast<std::uint64_t>(scaled + 0.5);
        if (static_cast<double>(nums[i]) != scaled)
            throw std::invalid_argument("interlace_values: input has more than m digits");
    }
    std::uint64_t z = interlace(alpha, b, m, nums);
    return static_cast<double>(z) / static_cast<double>(ipow_u64(b, alpha * m));
}

namespace detail {

std::uint64_t spread_slot(std::uint64_t packed, int alpha, std::uint32_t b,
                          int m, int slot) {
    // packed = sum_l u_l b^{m-l}; emit u_l at interlaced position
    // a = alpha*(l-1) + slot, i.e. weight b^{alpha*m - a}.
    std::uint64_t z = 0;
    for (int l = m; l >= 1; --l) {
        std::uint64_t u = packed % b;
        packed /= b;
        if (u) z += u * ipow_u64(b, alpha * m - (alpha * (l - 1) + slot));
    }
    return z;
}

LatticeTables build_tables(const PolyFb& modulus) {
    LatticeTables t;
    t.b = modulus.base();
    t.m = modulus.degree();
    t.n_points = ipow_u64(t.b, t.m);
    if (t.n_points > (1ull << 26))
        throw std::invalid_argument("build_tables: b^m too large");
    std::uint64_t order = t.n_points - 1;

    // Factor the group order, then find a generator by checking that
    // g^(order/p) != 1 for every prime factor p.
    std::vector<std::uint64_t> prime_factors;
    {
        std::uint64_t r = order;
        for (std::uint64_t d = 2; d * d <= r; ++d)
            if (r % d == 0) {
                prime_factors.push_back(d);
                while (r % d == 0) r /= d;
            }
        if (r > 1) prime_factors.push_back(r);
    }
    auto pow_mod = [&](const PolyFb& base_poly, std::uint64_t e) {
        PolyFb r = PolyFb::from_int(t.b, 1);
        PolyFb x = base_poly;
        while (e) {
            if (e & 1) r = poly_mul_mod(r, x, modulus);
            x = poly_mul_mod(x, x, modulus);
            e >>= 1;
        }
        return r;
    };
    PolyFb gen(t.b);
    bool found = false;
    for (std::uint64_t code = 1; code < t.n_points && !found; ++code) {
        PolyFb cand = PolyFb::from_int(t.b, code);
        bool ok = true;
        for (auto p : prime_factors)
            if (pow_mod(cand, order / p).is_one()) {
                ok = false;
                break;
            }
        if (ok) {
            gen = cand;
            found = true;
        }
    }
    if (!found) throw std::runtime_error("build_tables: no group generator found");

    t.exp_of.assign(order, 0);
    t.log_of.assign(t.n_points, 0);
    PolyFb cur = PolyFb::from_int(t.b, 1);
    for (std::uint64_t a = 0; a < order; ++a) {
        std::uint64_t enc = cur.to_int();
        t.exp_of[a] = static_cast<std::uint32_t>(enc);
        t.log_of[enc] = static_cast<std::uint32_t>(a);
        cur = poly_mul_mod(cur, gen, modulus);
    }
    if (!cur.is_one()) throw std::runtime_error("build_tables: generator order mismatch");

    t.digits.assign(t.n_points, 0);
    PolyFb one = PolyFb::from_int(t.b, 1);
    for (std::uint64_t w = 1; w < t.n_points; ++w)
        t.digits[w] = detail::laurent_digits_packed(PolyFb::from_int(t.b, w), one,
                                                    modulus, t.m);
    t.dig_exp.assign(order, 0);
    for (std::uint64_t a = 0; a < order; ++a) t.dig_exp[a] = t.digits[t.exp_of[a]];
    return t;
}

}  // namespace detail

PointSet generate_points(const InterlacedRuleSpec& spec) {
    spec.validate();
    detail::LatticeTables tables = detail::build_tables(spec.modulus);

    PointSet ps;
    ps.b = spec.b;
    ps.m = spec.m;
    ps.alpha = spec.alpha;
    ps.s = spec.s;
    ps.denominator = ipow_u64(spec.b, spec.alpha * spec.m);
    std::uint64_t n_points = spec.point_count();
    ps.coords.assign(n_points * spec.s, 0);

    // Precompute the spread of every possible digit block per slot.
    std::vector<std::vector<std::uint64_t>> spread(spec.alpha);
    for (int i = 1; i <= spec.alpha; ++i) {
        spread[i - 1].resize(tables.n_points);
        for (std::uint64_t d = 0; d < tables.n_points; ++d)
            spread[i - 1][d] = detail::spread_slot(d, spec.alpha, spec.b, spec.m, i);
    }

    for (int j = 0; j < spec.s; ++j) {
        for (int i = 1; i <= spec.alpha; ++i) {
            std::uint64_t q = spec.gen[static_cast<std::size_t>(j) * spec.alpha + i - 1].to_int();
            const auto& spr = spread[i - 1];
            for (std::uint64_t n = 1; n < n_points; ++n)
                ps.coords[n * spec.s + j] += spr[tables.coord(n, q)];
        }
    }
    return ps;
}

}  // namespace hoqmc
