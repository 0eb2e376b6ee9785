#pragma once

// Interlaced polynomial lattice rules: the rule description, digit
// interlacing, and bit-exact point generation.
//
// Underlying dimension k = (j-1)*alpha + i holds interlace slot i of
// parametric dimension j (both 1-based). Coordinates are fixed-point:
// an integer numerator over b^{alpha*m}.

#include <cstdint>
#include <span>
#include <vector>

#include "hoqmc/gfpoly.hpp"

namespace hoqmc {

struct InterlacedRuleSpec {
    std::uint32_t b = 2;
    int m = 1;      // N = b^m points
    int alpha = 1;  // interlacing order
    int s = 1;      // parametric dimension
    PolyFb modulus{2};
    std::vector<PolyFb> gen;  // alpha*s generating polynomials, degree < m

    std::uint64_t point_count() const;
    // Throws unless all type invariants hold (counts, degrees, gen[0] == 1,
    // irreducible modulus, b^{alpha*m} representable).
    void validate() const;
};

struct PointSet {
    std::uint32_t b = 2;
    int m = 1;
    int alpha = 1;
    int s = 1;
    std::uint64_t denominator = 2;        // b^{alpha*m}
    std::vector<std::uint64_t> coords;    // row-major N x s numerators

    std::uint64_t size() const { return s ? coords.size() / s : 0; }
    std::uint64_t at(std::uint64_t n, int j) const { return coords[n * s + j]; }
    double value(std::uint64_t n, int j) const {
        return static_cast<double>(coords[n * s + j]) / static_cast<double>(denominator);
    }
};

// Digit interlacing: output digit at position alpha*(l-1)+i is digit l of
// input i. Inputs are numerators over b^m, the result is over b^{alpha*m}.
std::uint64_t interlace(int alpha, std::uint32_t b, int m,
                        std::span<const std::uint64_t> numerators);

// Convenience for [0,1) inputs carrying at most m base-b digits.
double interlace_values(int alpha, std::uint32_t b, int m,
                        std::span<const double> values);

PointSet generate_points(const InterlacedRuleSpec& spec);

namespace detail {

// Discrete exp/log tables for the multiplicative group of F_b[x]/(P) and
// the per-residue lattice digits, shared by point generation and the CBC
// search. Residues are stored by integer encoding.
struct LatticeTables {
    std::uint32_t b;
    int m;
    std::uint64_t n_points;              // b^m
    std::vector<std::uint32_t> log_of;   // encoding -> exponent (log_of[0], log_of[?1] unused at 0)
    std::vector<std::uint32_t> exp_of;   // exponent -> encoding, length n_points-1
    std::vector<std::uint64_t> digits;   // encoding -> packed sum u_l b^{m-l}
    std::vector<std::uint64_t> dig_exp;  // digits[exp_of[a]]

    // packed digits of nu_m(n(x) q(x) / P) for integer encodings n, q
    std::uint64_t coord(std::uint64_t n, std::uint64_t q) const {
        if (n == 0 || q == 0) return 0;
        std::uint64_t a = log_of[n] + log_of[q];
        if (a >= n_points - 1) a -= n_points - 1;
        return dig_exp[a];
    }
};

LatticeTables build_tables(const PolyFb& modulus);

// Numerator contribution of packed underlying digits placed at interlace
// slot i (1-based): sum_l u_l * b^{alpha*m - (alpha*(l-1)+i)}.
std::uint64_t spread_slot(std::uint64_t packed, int alpha, std::uint32_t b,
                          int m, int slot);

}  // namespace detail

}  // namespace hoqmc
