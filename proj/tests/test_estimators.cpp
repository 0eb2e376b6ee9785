#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hoqmc/cbc.hpp"
#include "hoqmc/estimators.hpp"
#include "hoqmc/util.hpp"

using namespace hoqmc;

namespace {

AffineDiffusionProblem default_problem() {
    AffineDiffusionProblem p;
    p.a0 = 1.0;
    p.c = 0.3;
    p.theta = 2.0;
    p.p0 = 0.5;
    return p;
}

PointSet constructed_points(const AffineDiffusionProblem& p, std::uint32_t b, int m,
                            int alpha, int s) {
    SPODWeightSpec w{alpha, beta_sequence(p, s)};
    if (!(w.beta[0] > 0.0))
        for (int j = 0; j < s; ++j) w.beta[j] = std::pow(0.5, j + 1);
    return generate_points(cbc_construct(b, m, alpha, s, w));
}

}  // namespace

TEST_CASE("single level: constant integrand is exact for any rule") {
    AffineDiffusionProblem p = default_problem();
    p.c = 0.0;
    PointSet pts = constructed_points(p, 2, 4, 2, 3);
    Mesh mesh{63};
    SingleLevelConfig cfg{3, mesh, pts, 2};
    double est = run_single_level(p, cfg).estimate;
    SolverWorkspace ws(p, mesh, 0);
    CHECK(est == doctest::Approx(ws.qoi_of({})).epsilon(1e-15));
}

TEST_CASE("single level: N=2 rule averages the two point evaluations") {
    AffineDiffusionProblem p = default_problem();
    PointSet pts = constructed_points(p, 2, 1, 1, 1);
    REQUIRE(pts.size() == 2);
    Mesh mesh{31};
    SingleLevelConfig cfg{1, mesh, pts, 1};
    double est = run_single_level(p, cfg).estimate;
    SolverWorkspace ws(p, mesh, 1);
    double y0 = pts.value(0, 0) - 0.5, y1 = pts.value(1, 0) - 0.5;
    double direct = 0.5 * (ws.qoi_of(std::vector<double>{y0}) +
                           ws.qoi_of(std::vector<double>{y1}));
    CHECK(est == doctest::Approx(direct).epsilon(1e-15));
    CHECK(run_single_level(p, cfg).work_units == 2u * 31u);
}

TEST_CASE("single level vs dense 1D quadrature for small fluctuation") {
    AffineDiffusionProblem p = default_problem();
    p.c = 1e-3;
    Mesh mesh{63};
    PointSet pts = constructed_points(p, 2, 9, 2, 1);
    SingleLevelConfig cfg{1, mesh, pts, 2};
    double est = run_single_level(p, cfg).estimate;

    // oracle: composite midpoint quadrature in one parametric dimension
    SolverWorkspace ws(p, mesh, 1);
    int nq = 20000;
    Kahan acc;
    for (int i = 0; i < nq; ++i) {
        double y = -0.5 + (i + 0.5) / nq;
        acc.add(ws.qoi_of(std::vector<double>{y}));
    }
    double quad = acc.value() / nq;
    CHECK(est == doctest::Approx(quad).epsilon(1e-9));
}

TEST_CASE("single level estimate is invariant under row permutation") {
    AffineDiffusionProblem p = default_problem();
    PointSet pts = constructed_points(p, 2, 6, 2, 4);
    Mesh mesh{31};
    SingleLevelConfig cfg{4, mesh, pts, 2};
    double base = run_single_level(p, cfg).estimate;

    PointSet shuffled = pts;
    std::mt19937_64 rng(3);
    std::vector<std::uint64_t> perm(pts.size());
    for (std::uint64_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::uint64_t i = 0; i < perm.size(); ++i)
        for (int j = 0; j < pts.s; ++j)
            shuffled.coords[i * pts.s + j] = pts.at(perm[i], j);
    SingleLevelConfig cfg2{4, mesh, shuffled, 2};
    double permuted = run_single_level(p, cfg2).estimate;
    CHECK(permuted == doctest::Approx(base).epsilon(1e-13));
}

TEST_CASE("multi level: telescoping base cases") {
    AffineDiffusionProblem p = default_problem();
    PointSet pts = constructed_points(p, 2, 5, 2, 4);

    LevelSchedule one;
    one.b = 2;
    one.alpha = 2;
    one.levels = {{63, 4, 5}};
    one.level_points = {pts};
    EstimateResult ml = run_multi_level(p, one, 2);
    SingleLevelConfig cfg{4, Mesh{63}, pts, 2};
    EstimateResult sl = run_single_level(p, cfg);
    CHECK(ml.estimate == doctest::Approx(sl.estimate).epsilon(1e-15));
    CHECK(ml.work_units == sl.work_units);

    // identical levels telescope to the single-level value
    LevelSchedule twin;
    twin.b = 2;
    twin.alpha = 2;
    twin.levels = {{63, 4, 5}, {127, 4, 5}, {255, 4, 5}};
    twin.level_points = {pts, pts, pts};
    // make meshes genuinely refine but compare against the finest alone
    SingleLevelConfig fine_cfg{4, Mesh{255}, pts, 2};
    double fine = run_single_level(p, fine_cfg).estimate;
    double tele = run_multi_level(p, twin, 2).estimate;
    CHECK(tele == doctest::Approx(fine).epsilon(1e-13));
}

TEST_CASE("multi level: constant integrand collapses to the finest level") {
    AffineDiffusionProblem p = default_problem();
    p.c = 0.0;
    PointSet pts = constructed_points(p, 2, 4, 2, 2);
    LevelSchedule sch;
    sch.b = 2;
    sch.alpha = 2;
    sch.levels = {{31, 2, 4}, {63, 2, 4}};
    sch.level_points = {pts, pts};
    double est = run_multi_level(p, sch, 1).estimate;
    SolverWorkspace ws(p, Mesh{63}, 0);
    CHECK(est == doctest::Approx(ws.qoi_of({})).epsilon(1e-14));
}

TEST_CASE("estimators are linear in the functional") {
    AffineDiffusionProblem p = default_problem();
    PointSet pts = constructed_points(p, 2, 4, 2, 2);
    Mesh mesh{63};
    SingleLevelConfig cfg{2, mesh, pts, 1};

    // scaling: g -> 2.5 g scales the estimate
    AffineDiffusionProblem scaled = p;
    scaled.g = FunctionSpec::parse("const:2.5");
    double e1 = run_single_level(p, cfg).estimate;
    double e25 = run_single_level(scaled, cfg).estimate;
    CHECK(e25 == doctest::Approx(2.5 * e1).epsilon(1e-14));

    // additivity: qoi under g1 + lambda g2 equals the combination, checked
    // against a test-local nodal quadrature of the combined weight
    AffineDiffusionProblem pg2 = p;
    pg2.g = FunctionSpec::parse("sin:1");
    SolverWorkspace ws1(p, mesh, 2), ws2(pg2, mesh, 2);
    std::vector<double> y{0.25, -0.25}, dof;
    ws1.solve(y, dof);
    double lambda = 2.5;
    double combo = ws1.qoi(dof) + lambda * ws2.qoi(dof);
    double direct = 0.0;
    for (int i = 0; i < mesh.n_interior; ++i) {
        double x = mesh.node(i);
        direct += mesh.h() * (1.0 + lambda * std::sin(std::numbers::pi * x)) * dof[i];
    }
    CHECK(combo == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("truncation tail bound: frozen cases") {
    // p0 = 1/2: prefactor min(1/(1/p0-1),1) = 1, rate s^-1
    std::vector<double> beta{0.5, 0.25, 0.125, 0.0625};
    TailBound tb = truncation_tail_bound(beta, 4, 0.5);
    double psum = 0.0;
    for (double b : beta) psum += std::sqrt(b);
    CHECK(tb.bound == doctest::Approx(psum * psum / 4.0).epsilon(1e-14));
    CHECK(tb.qoi_bound == doctest::Approx(tb.bound * tb.bound).epsilon(1e-14));
    CHECK(tb.explicit_tail == 0.0);  // nothing stored beyond s

    CHECK_THROWS_AS(truncation_tail_bound(beta, 4, 1.0), std::invalid_argument);

    // beta_j = j^-2, s = 10: exact tail 0.0952; bound dominates it
    std::vector<double> b2(100000);
    for (std::size_t j = 0; j < b2.size(); ++j)
        b2[j] = 1.0 / ((j + 1.0) * (j + 1.0));
    TailBound tb2 = truncation_tail_bound(b2, 10, 0.75);
    CHECK(tb2.explicit_tail == doctest::Approx(0.0951663).epsilon(1e-4));
    CHECK(tb2.bound >= tb2.explicit_tail);
}

TEST_CASE("schedule optimizer: degenerate, balanced, and bounded") {
    RateParams rates{0.5, 0.5, 1.0, 1.0};
    ScheduleLimits limits;
    limits.coarse_mesh = 63;
    limits.alpha = 3;

    // loose target -> single level
    LevelSchedule loose = optimize_schedule(rates, limits, 1e-1);
    CHECK(loose.levels.size() == 1);

    // tighter target: after the large 0 -> 1 step the allocation drops
    // m_l by about one per level (N_l proportional to h_{l-1})
    LevelSchedule sch = optimize_schedule(rates, limits, 2e-6);
    REQUIRE(sch.levels.size() >= 4);
    for (std::size_t l = 1; l < sch.levels.size(); ++l)
        CHECK(sch.levels[l].m <= sch.levels[l - 1].m);
    for (std::size_t l = 2; l < sch.levels.size(); ++l) {
        int drop = sch.levels[l - 1].m - sch.levels[l].m;
        CHECK(drop >= 0);
        CHECK(drop <= 2);
    }
    CHECK(schedule_bound(sch, rates) <= 2e-6 * 1.0001);

    // forcing one level keeps the finest mesh so the target stays reachable
    LevelSchedule forced = optimize_schedule(rates, limits, 2e-6, 1);
    CHECK(forced.levels.size() == 1);
    CHECK(forced.levels[0].mesh_m == sch.levels.back().mesh_m);
    CHECK(schedule_bound(forced, rates) <= 2e-6 * 1.0001);

    // infeasible target
    limits.max_m = 5;
    CHECK_THROWS_AS(optimize_schedule(rates, limits, 1e-9), std::invalid_argument);
}

TEST_CASE("work accounting matches the formula exactly") {
    AffineDiffusionProblem p = default_problem();
    PointSet pts4 = constructed_points(p, 2, 4, 2, 2);
    PointSet pts3 = constructed_points(p, 2, 3, 2, 2);
    LevelSchedule sch;
    sch.b = 2;
    sch.alpha = 2;
    sch.levels = {{31, 2, 4}, {63, 2, 3}};
    sch.level_points = {pts4, pts3};
    EstimateResult res = run_multi_level(p, sch, 1);
    CHECK(res.work_units == 16u * 31u + 8u * (63u + 31u));
    CHECK(schedule_work_units(sch) == res.work_units);
}

TEST_CASE("mc baseline: determinism and exactness for constant integrands") {
    AffineDiffusionProblem p = default_problem();
    Mesh mesh{31};
    McResult a = mc_baseline(p, 4, mesh, 500, 1234, 1);
    McResult b = mc_baseline(p, 4, mesh, 500, 1234, 4);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
    McResult c = mc_baseline(p, 4, mesh, 500, 99, 1);
    CHECK(a.estimate != c.estimate);

    AffineDiffusionProblem flat = default_problem();
    flat.c = 0.0;
    SolverWorkspace ws(flat, mesh, 0);
    McResult d = mc_baseline(flat, 4, mesh, 64, 7, 2);
    CHECK(d.estimate == doctest::Approx(ws.qoi_of({})).epsilon(1e-15));
    CHECK(d.std_error == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("error breakdown: identical configs give zeros; c=0 decouples") {
    AffineDiffusionProblem p = default_problem();
    PointSet pts = constructed_points(p, 2, 5, 2, 4);
    Mesh mesh{63};
    SingleLevelConfig cfg{4, mesh, pts, 2};
    ReferenceConfig same{4, mesh, pts, 2};
    ErrorBreakdown eb = error_breakdown(p, cfg, same);
    CHECK(eb.truncation == 0.0);
    CHECK(eb.integration == 0.0);
    CHECK(eb.pg == 0.0);
    CHECK(eb.total == 0.0);

    AffineDiffusionProblem flat = default_problem();
    flat.c = 0.0;
    PointSet ref_pts = constructed_points(flat, 2, 8, 3, 8);
    ReferenceConfig ref{8, Mesh{255}, ref_pts, 2};
    ErrorBreakdown eb2 = error_breakdown(flat, cfg, ref);
    CHECK(eb2.truncation == 0.0);
    CHECK(eb2.integration == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eb2.pg > 0.0);
    CHECK(eb2.total <= eb2.truncation + eb2.integration + eb2.pg + 1e-15);

    // dominance check
    ReferenceConfig bad{2, Mesh{31}, pts, 2};
    CHECK_THROWS_AS(error_breakdown(p, cfg, bad), std::invalid_argument);
}

TEST_CASE("breakdown triangle inequality on the default problem") {
    AffineDiffusionProblem p = default_problem();
    PointSet pts = constructed_points(p, 2, 4, 2, 4);
    PointSet ref_pts = constructed_points(p, 2, 7, 3, 8);
    SingleLevelConfig cfg{4, Mesh{31}, pts, 2};
    ReferenceConfig ref{8, Mesh{127}, ref_pts, 2};
    ErrorBreakdown eb = error_breakdown(p, cfg, ref);
    CHECK(eb.total <= eb.truncation + eb.integration + eb.pg + 1e-14);
    CHECK(eb.reference != 0.0);
}
