#pragma once

// Single-level and multi-level QMC estimators of I(G(u)), the dimension
// truncation bound, the MC comparison baseline and the level-schedule
// optimizer. Work is accounted in tridiagonal solve rows: one solve on a
// mesh with M interior nodes costs M units.

#include <cstdint>
#include <optional>
#include <vector>

#include "hoqmc/pde.hpp"
#include "hoqmc/rule.hpp"

namespace hoqmc {

struct EstimateResult {
    double estimate = 0.0;
    std::uint64_t work_units = 0;
};

struct SingleLevelConfig {
    int s = 1;
    Mesh mesh;
    PointSet points;  // rule.s may exceed s; the first s columns are used
    int threads = 1;
};

// (1/N) sum_n G(u^h_s(y_n - 1/2)); solves may run concurrently, the mean
// is reduced in fixed blocked order.
EstimateResult run_single_level(const AffineDiffusionProblem& problem,
                                const SingleLevelConfig& cfg);

struct Level {
    int mesh_m = 1;  // interior node count M_l
    int s = 1;
    int m = 1;       // N_l = b^m_l
};

struct LevelSchedule {
    std::uint32_t b = 2;
    int alpha = 1;
    std::vector<Level> levels;          // coarse to fine; h strictly decreasing
    std::vector<PointSet> level_points; // one point set per level (rules[l].s = s_l)

    void validate(bool with_points) const;
};

// Telescoping estimator: level l quadrates
// G(u^{h_l}_{s_l}) - G(u^{h_{l-1}}_{s_{l-1}}) at shared points (the coarse
// term sees the first s_{l-1} coordinates, the rest anchored at zero); the
// l = 0 coarse term is zero.
EstimateResult run_multi_level(const AffineDiffusionProblem& problem,
                               const LevelSchedule& schedule, int threads = 1);

struct TailBound {
    double explicit_tail = 0.0;  // sum of stored beta_j for j > s
    double bound = 0.0;          // min(1/(1/p0-1),1) (sum beta^p0)^{1/p0} s^{-(1/p0-1)}
    double qoi_bound = 0.0;      // bound squared (constant treated as 1)
};

TailBound truncation_tail_bound(const std::vector<double>& beta, int s, double p0);

struct RateParams {
    double p0 = 0.5;
    double p_t = 0.5;
    double t = 1.0;
    double t_prime = 1.0;
};

struct ScheduleLimits {
    std::uint32_t b = 2;
    int alpha = 1;
    int coarse_mesh = 63;   // M_0; level l uses M = (M_0+1) 2^l - 1
    int max_mesh = 1 << 14;
    int max_m = 13;
    int max_levels = 8;
    int min_s = 1;
};

// Geometric schedule meeting the target with all bound constants treated
// as 1: h_L and s_L take a third of the budget each, the level sizes N_l
// spend the rest by a work-optimal (Lagrange) allocation. force_levels
// pins L+1 levels (0 = free).
LevelSchedule optimize_schedule(const RateParams& rates, const ScheduleLimits& limits,
                                double target, int force_levels = 0);

// The combined multi-level bound expression with unit constants:
// s_L^{-2(1/p0-1)} + h_L^{t+t'} + sum_l N_l^{-1/p_t} * coupling_l.
double schedule_bound(const LevelSchedule& schedule, const RateParams& rates);

std::uint64_t schedule_work_units(const LevelSchedule& schedule);

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t work_units = 0;
};

// Plain Monte Carlo with a seeded deterministic generator (mt19937_64,
// 53-bit uniforms); bitwise reproducible for a fixed seed.
McResult mc_baseline(const AffineDiffusionProblem& problem, int s, const Mesh& mesh,
                     std::uint64_t n, std::uint64_t seed, int threads = 1);

struct ErrorBreakdown {
    double truncation = 0.0;
    double integration = 0.0;
    double pg = 0.0;
    double total = 0.0;
    double reference = 0.0;
};

struct ReferenceConfig {
    int s = 1;
    Mesh mesh;
    PointSet points;
    int threads = 1;
};

// Component split against a strictly dominating overkill reference:
// truncation at the reference mesh/rule (anchored to cfg.s), integration
// between the two rules at (cfg.s, reference mesh), PG between the meshes
// at the cfg rule.
ErrorBreakdown error_breakdown(const AffineDiffusionProblem& problem,
                               const SingleLevelConfig& cfg,
                               const ReferenceConfig& reference);

}  // namespace hoqmc
