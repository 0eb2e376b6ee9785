"""End-to-end smoke checks for the python bindings."""

import math
import sys

import hoqmc


def approx(a, b, tol=1e-12):
    assert abs(a - b) <= tol * max(1.0, abs(a), abs(b)), (a, b)


def main():
    # field arithmetic on integer encodings
    assert hoqmc.poly_mul_mod(3, 3, 7, b=2) == 2  # (x+1)^2 mod x^2+x+1 = x
    assert hoqmc.is_irreducible(7)
    assert not hoqmc.is_irreducible(5)
    assert hoqmc.first_irreducible(3) == 11
    assert hoqmc.laurent_digits(1, 1, 7, 2) == [0, 1]   # coordinate 0.25
    assert hoqmc.laurent_digits(2, 1, 7, 2) == [1, 1]   # coordinate 0.75

    # weights and kernels
    assert hoqmc.dick_weight(5, 2) == 4
    approx(hoqmc.walsh_kernel(0, 2, 1), 0.875)
    approx(hoqmc.walsh_kernel(3, 2, 1), -0.625)
    approx(hoqmc.spod_set_weight([1], 2, [0.5, 0.25]), 1.5)
    assert hoqmc.interlace(2, 2, 2, [2, 1]) == 9  # 0.5625

    # rule construction and points
    spec = hoqmc.cbc_construct(2, 3, 2, 2, [0.5, 0.25])
    assert spec.gen[0] == 1 and len(spec.gen) == 4
    pts = hoqmc.generate_points(spec)
    assert pts.n == 8
    assert pts.row(0) == [0.0, 0.0]
    text = spec.serialize()
    assert text.splitlines()[0] == "hoqmc-pointset v1"
    spec2 = hoqmc.parse_rule_spec(text)
    assert spec2.gen == spec.gen

    # model problem
    problem = hoqmc.Problem(a0=1.0, c=0.3, theta=2.0)
    rep = hoqmc.check_admissibility(problem, 1000)
    assert rep.ok and rep.mu == (1.0 - rep.kappa / 2.0) * rep.mu0
    beta = hoqmc.beta_sequence(problem, 4)
    approx(beta[0], 0.3)
    approx(beta[1], 0.075)

    dof = hoqmc.solve(hoqmc.Problem(c=0.0), [], 127)
    approx(hoqmc.qoi(hoqmc.Problem(c=0.0), dof, 127), 1.0 / 12.0, 1e-4)

    # estimators
    flat = hoqmc.Problem(c=0.0)
    est, work = hoqmc.run_single_level(flat, 2, 63, hoqmc.generate_points(
        hoqmc.cbc_construct(2, 4, 2, 2, [0.5, 0.25])))
    approx(est, hoqmc.qoi(flat, hoqmc.solve(flat, [], 63), 63))
    assert work == 16 * 63

    e1, se1, _ = hoqmc.mc_baseline(flat, 2, 63, 32, seed=1)
    e2, se2, _ = hoqmc.mc_baseline(flat, 2, 63, 32, seed=1)
    assert e1 == e2 and se1 == se2

    tail, bound, qoi_bound = hoqmc.truncation_tail_bound([0.5, 0.25, 0.125], 3, 0.5)
    assert tail == 0.0 and qoi_bound == bound * bound

    # schedule optimizer + multi-level telescoping on a constant integrand
    sch = hoqmc.optimize_schedule(0.5, 0.5, 1.0, 1.0, 3e-4)
    assert len(sch.levels) >= 2
    assert sch.levels[-1].M > sch.levels[0].M
    level_pts = [
        hoqmc.generate_points(
            hoqmc.cbc_construct(2, lev.m, 3, lev.s, [0.5 ** (j + 1) for j in range(lev.s)]))
        for lev in sch.levels
    ]
    ml_est, ml_work = hoqmc.run_multi_level(flat, sch, level_pts, threads=2)
    fine_m = sch.levels[-1].M
    approx(ml_est, hoqmc.qoi(flat, hoqmc.solve(flat, [], fine_m), fine_m), 1e-13)
    assert ml_work > 0

    slope, half = hoqmc.fit_slope([(x, x ** -2.0) for x in (2.0, 4.0, 8.0, 16.0)])
    approx(slope, -2.0, 1e-9)

    print("python smoke: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
