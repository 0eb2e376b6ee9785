#include <doctest.h>

#include <set>

#include "hoqmc/rule.hpp"
#include "hoqmc/util.hpp"
#include "oracles.hpp"

using namespace hoqmc;

namespace {

InterlacedRuleSpec make_spec(std::uint32_t b, int m, int alpha, int s,
                             std::uint64_t modulus, std::vector<std::uint64_t> gens) {
    InterlacedRuleSpec spec;
    spec.b = b;
    spec.m = m;
    spec.alpha = alpha;
    spec.s = s;
    spec.modulus = PolyFb::from_int(b, modulus);
    for (auto g : gens) spec.gen.push_back(PolyFb::from_int(b, g));
    return spec;
}

}  // namespace

TEST_CASE("interlace frozen examples") {
    // alpha=2, b=2, m=1: (0.5, 0.25 needs 2 digits) -- use m=2
    std::vector<std::uint64_t> in{2, 1};  // 0.10b and 0.01b over b^2
    CHECK(interlace(2, 2, 2, in) == 9);   // 0.1001b = 9/16 = 0.5625
    std::vector<double> vals{0.5, 0.25};
    CHECK(interlace_values(2, 2, 2, vals) == 0.5625);
    std::vector<double> zeros{0.0, 0.0};
    CHECK(interlace_values(2, 2, 3, zeros) == 0.0);
    std::vector<double> third{0.5, 0.0, 0.0};
    CHECK(interlace_values(3, 2, 1, third) == 0.5);  // 0.100b
    std::vector<std::uint64_t> wrong{1};
    CHECK_THROWS_AS(interlace(2, 2, 2, wrong), std::invalid_argument);
}

TEST_CASE("interlace round trips through digit extraction") {
    int alpha = 3, m = 4;
    std::uint32_t b = 2;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        std::vector<std::uint64_t> in(alpha);
        std::uint64_t v = seed * 2654435761u;
        for (int i = 0; i < alpha; ++i) {
            in[i] = v % ipow_u64(b, m);
            v /= 16;
        }
        std::uint64_t z = interlace(alpha, b, m, in);
        // de-interlace: digit at position alpha*(l-1)+i must equal digit l of input i
        for (int i = 1; i <= alpha; ++i) {
            std::uint64_t rec = 0;
            for (int l = 1; l <= m; ++l) {
                int pos = alpha * (l - 1) + i;
                std::uint64_t digit = (z / ipow_u64(b, alpha * m - pos)) % b;
                rec = rec * b + digit;
            }
            CHECK(rec == in[i - 1]);
        }
    }
}

TEST_CASE("generate_points matches the Laurent oracle, m=2 classic case") {
    auto spec = make_spec(2, 2, 1, 1, 7, {1});
    PointSet pts = generate_points(spec);
    REQUIRE(pts.size() == 4);
    CHECK(pts.value(0, 0) == 0.0);
    CHECK(pts.value(1, 0) == 0.25);
    CHECK(pts.value(2, 0) == 0.75);
    CHECK(pts.value(3, 0) == 0.5);
}

TEST_CASE("generate_points: interlaced single point example") {
    // b=2, m=1, alpha=2, s=1, P=x, gen=(1,1): n=1 -> both slots 0.5 -> 0.11b
    auto spec = make_spec(2, 1, 2, 1, 2, {1, 1});
    PointSet pts = generate_points(spec);
    REQUIRE(pts.size() == 2);
    CHECK(pts.value(0, 0) == 0.0);
    CHECK(pts.value(1, 0) == 0.75);
}

TEST_CASE("generate_points equals per-point Laurent + interlace composition") {
    auto spec = make_spec(2, 3, 2, 2, 11, {1, 5, 3, 7});
    PointSet pts = generate_points(spec);
    for (std::uint64_t n = 0; n < pts.size(); ++n) {
        for (int j = 0; j < spec.s; ++j) {
            std::vector<std::uint64_t> slots(spec.alpha);
            for (int i = 0; i < spec.alpha; ++i) {
                auto dig = oracle::laurent(
                    oracle::from_poly(PolyFb::from_int(2, n)),
                    oracle::from_poly(spec.gen[j * spec.alpha + i]),
                    oracle::from_poly(spec.modulus), spec.m, 2);
                std::uint64_t packed = 0;
                for (int d : dig) packed = packed * 2 + d;
                slots[i] = packed;
            }
            CHECK(pts.at(n, j) == interlace(spec.alpha, 2, spec.m, slots));
        }
    }
}

TEST_CASE("point set columns are injective and contain the origin") {
    for (int m = 1; m <= 6; ++m) {
        std::uint64_t n_points = ipow_u64(2, m);
        auto spec = make_spec(2, m, 2, 2, first_irreducible(2, m).to_int(),
                              {1, n_points - 1, 1, (n_points / 2) | 1});
        PointSet pts = generate_points(spec);
        for (int j = 0; j < spec.s; ++j) {
            CHECK(pts.at(0, j) == 0);
            std::set<std::uint64_t> vals;
            for (std::uint64_t n = 0; n < pts.size(); ++n) vals.insert(pts.at(n, j));
            CHECK(vals.size() == pts.size());
        }
    }
}

TEST_CASE("spec validation rejects malformed rules") {
    CHECK_THROWS(make_spec(2, 2, 1, 1, 5, {1}).validate());   // reducible modulus
    CHECK_THROWS(make_spec(2, 2, 1, 1, 7, {1, 1}).validate()); // wrong gen count
    CHECK_THROWS(make_spec(2, 2, 1, 1, 7, {0}).validate());   // zero generator
    CHECK_THROWS(make_spec(2, 2, 1, 2, 7, {2, 1}).validate()); // gen[0] != 1
    CHECK_NOTHROW(make_spec(2, 2, 1, 2, 7, {1, 2}).validate());
}
