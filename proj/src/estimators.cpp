#include "hoqmc/estimators.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "hoqmc/util.hpp"

namespace hoqmc {

namespace {

// Deterministic blocked mean of per-point values, parallel over blocks.
double blocked_mean(std::uint64_t n_points, int threads,
                    const std::vector<double>& values) {
    std::size_t nblocks = block_count(n_points);
    std::vector<double> partial(nblocks, 0.0);
    parallel_for(nblocks, threads, [&](std::size_t bi) {
        std::uint64_t b0 = bi * kSumBlock;
        std::uint64_t b1 = std::min<std::uint64_t>(n_points, b0 + kSumBlock);
        Kahan blk;
        for (std::uint64_t i = b0; i < b1; ++i) blk.add(values[i]);
        partial[bi] = blk.value();
    });
    Kahan total;
    for (double p : partial) total.add(p);
    return total.value() / static_cast<double>(n_points);
}

}  // namespace

EstimateResult run_single_level(const AffineDiffusionProblem& problem,
                                const SingleLevelConfig& cfg) {
    problem.validate();
    cfg.mesh.validate();
    if (cfg.s < 1 || cfg.s > cfg.points.s)
        throw std::invalid_argument("run_single_level: s exceeds point set dimension");
    std::uint64_t n_points = cfg.points.size();
    if (n_points == 0) throw std::invalid_argument("run_single_level: empty point set");

    SolverWorkspace ws(problem, cfg.mesh, cfg.s);
    std::size_t nblocks = block_count(n_points);
    std::vector<double> values(n_points);
    parallel_for(nblocks, cfg.threads, [&](std::size_t bi) {
        std::uint64_t b0 = bi * kSumBlock;
        std::uint64_t b1 = std::min<std::uint64_t>(n_points, b0 + kSumBlock);
        std::vector<double> y(cfg.s), dof;
        for (std::uint64_t n = b0; n < b1; ++n) {
            for (int j = 0; j < cfg.s; ++j) y[j] = cfg.points.value(n, j) - 0.5;
            ws.solve(y, dof);
            values[n] = ws.qoi(dof);
        }
    });
    EstimateResult res;
    res.estimate = blocked_mean(n_points, cfg.threads, values);
    res.work_units = n_points * static_cast<std::uint64_t>(cfg.mesh.n_interior);
    return res;
}

void LevelSchedule::validate(bool with_points) const {
    if (levels.empty()) throw std::invalid_argument("schedule: no levels");
    for (std::size_t l = 0; l < levels.size(); ++l) {
        if (levels[l].mesh_m < 1 || levels[l].s < 1 || levels[l].m < 1)
            throw std::invalid_argument("schedule: invalid level sizes");
        if (l > 0 && levels[l].mesh_m <= levels[l - 1].mesh_m)
            throw std::invalid_argument("schedule: mesh must refine strictly");
        if (l > 0 && levels[l].s < levels[l - 1].s)
            throw std::invalid_argument("schedule: s must be non-decreasing");
    }
    if (with_points) {
        if (level_points.size() != levels.size())
            throw std::invalid_argument("schedule: points missing for some levels");
        for (std::size_t l = 0; l < levels.size(); ++l) {
            if (level_points[l].s < levels[l].s)
                throw std::invalid_argument("schedule: point set dimension below s_l");
            if (level_points[l].size() != ipow_u64(b, levels[l].m))
                throw std::invalid_argument("schedule: point count mismatch");
        }
    }
}

EstimateResult run_multi_level(const AffineDiffusionProblem& problem,
                               const LevelSchedule& schedule, int threads) {
    problem.validate();
    schedule.validate(true);
    EstimateResult res;
    Kahan total;
    for (std::size_t l = 0; l < schedule.levels.size(); ++l) {
        const Level& lev = schedule.levels[l];
        const PointSet& pts = schedule.level_points[l];
        std::uint64_t n_points = pts.size();
        Mesh fine{lev.mesh_m};
        SolverWorkspace ws_fine(problem, fine, lev.s);
        std::unique_ptr<SolverWorkspace> ws_coarse;
        int s_coarse = 0;
        if (l > 0) {
            Mesh coarse{schedule.levels[l - 1].mesh_m};
            s_coarse = schedule.levels[l - 1].s;
            ws_coarse = std::make_unique<SolverWorkspace>(problem, coarse, s_coarse);
        }
        std::size_t nblocks = block_count(n_points);
        std::vector<double> values(n_points);
        parallel_for(nblocks, threads, [&](std::size_t bi) {
            std::uint64_t b0 = bi * kSumBlock;
            std::uint64_t b1 = std::min<std::uint64_t>(n_points, b0 + kSumBlock);
            std::vector<double> y(lev.s), dof;
            for (std::uint64_t n = b0; n < b1; ++n) {
                for (int j = 0; j < lev.s; ++j) y[j] = pts.value(n, j) - 0.5;
                ws_fine.solve(y, dof);
                double val = ws_fine.qoi(dof);
                if (ws_coarse) {
                    ws_coarse->solve(std::span<const double>(y).first(s_coarse), dof);
                    val -= ws_coarse->qoi(dof);
                }
                values[n] = val;
            }
        });
        total.add(blocked_mean(n_points, threads, values));
        res.work_units += n_points * static_cast<std::uint64_t>(lev.mesh_m);
        if (l > 0)
            res.work_units +=
                n_points * static_cast<std::uint64_t>(schedule.levels[l - 1].mesh_m);
    }
    res.estimate = total.value();
    return res;
}

TailBound truncation_tail_bound(const std::vector<double>& beta, int s, double p0) {
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::invalid_argument("truncation_tail_bound: p0 must lie in (0,1)");
    if (s < 1) throw std::invalid_argument("truncation_tail_bound: s must be >= 1");
    TailBound tb;
    Kahan tail;
    for (std::size_t j = s; j < beta.size(); ++j) tail.add(beta[j]);
    tb.explicit_tail = tail.value();
    Kahan psum;
    for (double bj : beta) psum.add(std::pow(bj, p0));
    double prefac = std::min(1.0 / (1.0 / p0 - 1.0), 1.0);
    tb.bound = prefac * std::pow(psum.value(), 1.0 / p0) *
               std::pow(static_cast<double>(s), -(1.0 / p0 - 1.0));
    tb.qoi_bound = tb.bound * tb.bound;
    return tb;
}

namespace {

double level_coupling(const RateParams& r, const LevelSchedule& sch, std::size_t l) {
    if (l == 0) return 1.0;
    double h_prev = 1.0 / (sch.levels[l - 1].mesh_m + 1);
    double coupling = std::pow(h_prev, r.t + r.t_prime);
    if (r.p_t > r.p0)
        coupling += std::pow(static_cast<double>(sch.levels[l - 1].s),
                             -(1.0 / r.p0 - 1.0 / r.p_t));
    return coupling;
}

}  // namespace

double schedule_bound(const LevelSchedule& schedule, const RateParams& rates) {
    schedule.validate(false);
    const Level& last = schedule.levels.back();
    double h_last = 1.0 / (last.mesh_m + 1);
    double bound = std::pow(static_cast<double>(last.s), -2.0 * (1.0 / rates.p0 - 1.0)) +
                   std::pow(h_last, rates.t + rates.t_prime);
    for (std::size_t l = 0; l < schedule.levels.size(); ++l) {
        double n_l = std::pow(static_cast<double>(schedule.b), schedule.levels[l].m);
        bound += std::pow(n_l, -1.0 / rates.p_t) * level_coupling(rates, schedule, l);
    }
    return bound;
}

std::uint64_t schedule_work_units(const LevelSchedule& schedule) {
    schedule.validate(false);
    std::uint64_t work = 0;
    for (std::size_t l = 0; l < schedule.levels.size(); ++l) {
        std::uint64_t n_l = ipow_u64(schedule.b, schedule.levels[l].m);
        work += n_l * static_cast<std::uint64_t>(schedule.levels[l].mesh_m);
        if (l > 0)
            work += n_l * static_cast<std::uint64_t>(schedule.levels[l - 1].mesh_m);
    }
    return work;
}

LevelSchedule optimize_schedule(const RateParams& rates, const ScheduleLimits& limits,
                                double target, int force_levels) {
    if (!(target > 0.0)) throw std::invalid_argument("optimize_schedule: target <= 0");
    if (!(rates.p0 > 0.0 && rates.p0 <= rates.p_t && rates.p_t < 1.0))
        throw std::invalid_argument("optimize_schedule: need 0 < p0 <= p_t < 1");
    if (!(rates.t > 0.0 && rates.t_prime > 0.0))
        throw std::invalid_argument("optimize_schedule: need t, t' > 0");

    double tt = rates.t + rates.t_prime;
    double share = target / 3.0;

    // Mesh ladder h_l = h_0 2^{-l} from the coarse mesh; the finest rung
    // must meet the PG share. Forcing a level count keeps the same finest
    // rung and drops coarser ones.
    int finest = 0;
    while (true) {
        double h_l = 1.0 / ((limits.coarse_mesh + 1) * (1 << finest));
        if (std::pow(h_l, tt) <= share || finest >= limits.max_levels - 1) break;
        ++finest;
    }
    int levels = force_levels > 0 ? force_levels : finest + 1;
    if (levels > finest + 1) levels = finest + 1;
    LevelSchedule sch;
    sch.b = limits.b;
    sch.alpha = limits.alpha;
    sch.levels.resize(levels);
    for (int l = 0; l < levels; ++l) {
        int rung = finest - (levels - 1) + l;
        long mesh = static_cast<long>(limits.coarse_mesh + 1) * (1L << rung) - 1;
        if (mesh > limits.max_mesh)
            throw std::invalid_argument("optimize_schedule: target needs a finer mesh than allowed");
        sch.levels[l].mesh_m = static_cast<int>(mesh);
    }

    // Truncation dimension: finest level meets its share, coarser levels
    // shrink geometrically with exponent (t+t')/(2(1/p0-1)).
    double trunc_rate = 2.0 * (1.0 / rates.p0 - 1.0);
    double s_fine = std::pow(share, -1.0 / trunc_rate);
    double growth = tt / trunc_rate;
    for (int l = 0; l < levels; ++l) {
        double s_l = s_fine * std::pow(2.0, -growth * (levels - 1 - l));
        sch.levels[l].s = std::max(limits.min_s, static_cast<int>(std::ceil(s_l)));
    }
    for (int l = 1; l < levels; ++l)
        sch.levels[l].s = std::max(sch.levels[l].s, sch.levels[l - 1].s);

    // Work-optimal level sizes for the remaining budget: minimize
    // sum N_l w_l subject to sum N_l^{-1/p_t} c_l <= share, giving
    // N_l proportional to (c_l / w_l)^{p_t/(1+p_t)}.
    std::vector<double> coupling(levels), work_w(levels), shape(levels);
    for (int l = 0; l < levels; ++l) {
        coupling[l] = level_coupling(rates, sch, l);
        work_w[l] = sch.levels[l].mesh_m + (l > 0 ? sch.levels[l - 1].mesh_m : 0);
        shape[l] = std::pow(coupling[l] / work_w[l], rates.p_t / (1.0 + rates.p_t));
    }
    // scale so the integration budget is met: sum (scale*shape)^-1/pt c = share
    double resid = 0.0;
    for (int l = 0; l < levels; ++l)
        resid += coupling[l] * std::pow(shape[l], -1.0 / rates.p_t);
    double scale = std::pow(resid / share, rates.p_t);
    double log_b = std::log(static_cast<double>(limits.b));
    for (int l = 0; l < levels; ++l) {
        double n_l = std::max(scale * shape[l], 1.0);
        int m_l = std::max(1, static_cast<int>(std::ceil(std::log(n_l) / log_b - 1e-12)));
        if (m_l > limits.max_m)
            throw std::invalid_argument("optimize_schedule: target needs more points than allowed");
        sch.levels[l].m = m_l;
    }
    return sch;
}

McResult mc_baseline(const AffineDiffusionProblem& problem, int s, const Mesh& mesh,
                     std::uint64_t n, std::uint64_t seed, int threads) {
    problem.validate();
    mesh.validate();
    if (n < 1) throw std::invalid_argument("mc_baseline: need n >= 1");
    SolverWorkspace ws(problem, mesh, s);

    // Draw all points up front so the stream is independent of threading.
    std::vector<double> coords(n * static_cast<std::uint64_t>(s));
    std::mt19937_64 rng(seed);
    for (auto& v : coords)
        v = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;

    std::size_t nblocks = block_count(n);
    std::vector<double> values(n);
    parallel_for(nblocks, threads, [&](std::size_t bi) {
        std::uint64_t b0 = bi * kSumBlock;
        std::uint64_t b1 = std::min<std::uint64_t>(n, b0 + kSumBlock);
        std::vector<double> dof;
        for (std::uint64_t i = b0; i < b1; ++i) {
            std::span<const double> y(&coords[i * s], s);
            ws.solve(y, dof);
            values[i] = ws.qoi(dof);
        }
    });
    McResult res;
    res.estimate = blocked_mean(n, threads, values);
    double var = 0.0;
    if (n > 1) {
        var = blocked_sum(n, [&](std::size_t i) {
            double d = values[i] - res.estimate;
            return d * d;
        });
        var /= static_cast<double>(n - 1);
    }
    res.std_error = std::sqrt(var / static_cast<double>(n));
    res.work_units = n * static_cast<std::uint64_t>(mesh.n_interior);
    return res;
}

ErrorBreakdown error_breakdown(const AffineDiffusionProblem& problem,
                               const SingleLevelConfig& cfg,
                               const ReferenceConfig& reference) {
    if (reference.s < cfg.s || reference.mesh.n_interior < cfg.mesh.n_interior ||
        reference.points.size() < cfg.points.size())
        throw std::invalid_argument("error_breakdown: reference must dominate cfg");
    bool strict = reference.s > cfg.s || reference.mesh.n_interior > cfg.mesh.n_interior ||
                  reference.points.size() > cfg.points.size();
    bool equal = reference.s == cfg.s &&
                 reference.mesh.n_interior == cfg.mesh.n_interior &&
                 reference.points.size() == cfg.points.size();
    if (!strict && !equal)
        throw std::invalid_argument("error_breakdown: reference must dominate cfg");

    int threads = cfg.threads;
    // full reference value
    SingleLevelConfig ref_cfg{reference.s, reference.mesh, reference.points, threads};
    double ref_full = run_single_level(problem, ref_cfg).estimate;
    // truncation: reference rule/mesh anchored to cfg.s dimensions
    SingleLevelConfig ref_trunc{cfg.s, reference.mesh, reference.points, threads};
    double ref_at_s = run_single_level(problem, ref_trunc).estimate;
    // integration: cfg rule vs reference rule at (cfg.s, reference mesh)
    SingleLevelConfig cfg_on_ref_mesh{cfg.s, reference.mesh, cfg.points, threads};
    double cfg_ref_mesh = run_single_level(problem, cfg_on_ref_mesh).estimate;
    // pg: cfg rule at reference mesh vs cfg mesh
    double cfg_own = run_single_level(problem, cfg).estimate;

    ErrorBreakdown eb;
    eb.reference = ref_full;
    eb.truncation = std::abs(ref_at_s - ref_full);
    eb.integration = std::abs(cfg_ref_mesh - ref_at_s);
    eb.pg = std::abs(cfg_own - cfg_ref_mesh);
    eb.total = std::abs(cfg_own - ref_full);
    return eb;
}

}  // namespace hoqmc
