#include "hoqmc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hoqmc/cbc.hpp"
#include "hoqmc/io.hpp"
#include "hoqmc/util.hpp"

namespace hoqmc {

std::string axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Mesh: return "mesh";
        case SweepAxis::Truncation: return "truncation";
        case SweepAxis::QmcN: return "qmc-N";
        case SweepAxis::MlVsSl: return "ml-vs-sl";
    }
    throw std::logic_error("axis_name: bad axis");
}

SweepAxis axis_from_name(const std::string& name) {
    if (name == "mesh") return SweepAxis::Mesh;
    if (name == "truncation") return SweepAxis::Truncation;
    if (name == "qmc-N") return SweepAxis::QmcN;
    if (name == "ml-vs-sl") return SweepAxis::MlVsSl;
    throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

void SweepPlan::validate() const {
    problem.validate();
    if (grid.size() < 4)
        throw std::invalid_argument("sweep plan: need at least 4 grid entries");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw std::invalid_argument("sweep plan: grid must be strictly increasing");
    if (alpha < 1 || fixed_mesh < 1 || fixed_s < 1 || fixed_m < 1)
        throw std::invalid_argument("sweep plan: invalid fixed configuration");
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& rows) {
    std::vector<std::pair<double, double>> usable;
    for (const auto& [x, err] : rows)
        if (err > 0.0 && x > 0.0) usable.emplace_back(std::log(x), std::log(err));
    if (usable.size() < 4)
        throw std::invalid_argument("fit_slope: fewer than 4 usable rows");
    double n = static_cast<double>(usable.size());
    double sx = 0, sy = 0;
    for (const auto& [x, y] : usable) {
        sx += x;
        sy += y;
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : usable) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissa");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.n_used = static_cast<int>(usable.size());
    double ss_res = 0;
    for (const auto& [x, y] : usable) {
        double r = y - my - fit.slope * (x - mx);
        ss_res += r * r;
    }
    if (usable.size() > 2) {
        double var = ss_res / (n - 2.0) / sxx;
        fit.half_width = 2.0 * std::sqrt(var);
    }
    return fit;
}

namespace {

PointSet construct_points(const AffineDiffusionProblem& problem, std::uint32_t b,
                          int m, int alpha, int s, int threads,
                          std::uint64_t* spec_hash = nullptr) {
    SPODWeightSpec weights;
    weights.alpha = alpha;
    weights.beta = beta_sequence(problem, s);
    if (!(weights.beta[0] > 0.0)) {
        // c = 0 leaves no weight signal; fall back to a geometric sequence
        // so the construction stays well defined (the integrand is constant
        // anyway, every rule integrates it exactly).
        for (int j = 0; j < s; ++j) weights.beta[j] = std::pow(0.5, j + 1);
    }
    CbcOptions opts;
    opts.threads = threads;
    InterlacedRuleSpec spec = cbc_construct(b, m, alpha, s, weights, opts);
    if (spec_hash) {
        std::string text = serialize_rule_spec(spec);
        *spec_hash = fnv1a(text.data(), text.size());
    }
    return generate_points(spec);
}

struct SweepContext {
    double reference = 0.0;
    std::vector<SweepRow> rows;
    // named fingerprints of the rules involved, echoed into the report
    std::vector<std::pair<std::string, std::uint64_t>> hashes;
};

// Runs one row, turning a solve failure into a flagged row instead of
// aborting the sweep.
template <class F>
SweepRow guarded_row(const std::string& tag, double value, F&& body) {
    SweepRow row;
    row.tag = tag;
    row.value = value;
    try {
        auto [error, work] = body();
        row.error = error;
        row.work = work;
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = std::numeric_limits<double>::quiet_NaN();
        row.failure = e.what();
    }
    return row;
}

SweepContext sweep_mesh(const SweepPlan& plan) {
    SweepContext ctx;
    std::uint64_t rule_hash = 0;
    PointSet pts = construct_points(plan.problem, plan.b, plan.fixed_m, plan.alpha,
                                    plan.fixed_s, plan.threads, &rule_hash);
    ctx.hashes.emplace_back("rule_hash", rule_hash);
    if (plan.ref_analytic) {
        ctx.reference = *plan.ref_analytic;
    } else {
        Mesh ref_mesh{plan.ref_mesh.value_or(4 * (plan.fixed_mesh + 1) - 1)};
        SingleLevelConfig ref{plan.fixed_s, ref_mesh, pts, plan.threads};
        ctx.reference = run_single_level(plan.problem, ref).estimate;
    }
    for (std::int64_t mval : plan.grid) {
        ctx.rows.push_back(guarded_row(
            axis_name(plan.axis), static_cast<double>(mval),
            [&]() -> std::pair<double, std::uint64_t> {
                SingleLevelConfig cfg{plan.fixed_s, Mesh{static_cast<int>(mval)}, pts,
                                      plan.threads};
                EstimateResult est = run_single_level(plan.problem, cfg);
                return {std::abs(est.estimate - ctx.reference), est.work_units};
            }));
    }
    return ctx;
}

SweepContext sweep_truncation(const SweepPlan& plan) {
    // One rule at the reference dimension; rows anchor its leading s
    // coordinates so the quadrature error cancels between row and reference.
    SweepContext ctx;
    int s_ref = plan.ref_s.value_or(2 * static_cast<int>(plan.grid.back()));
    std::uint64_t rule_hash = 0;
    PointSet pts = construct_points(plan.problem, plan.b, plan.fixed_m, plan.alpha,
                                    s_ref, plan.threads, &rule_hash);
    ctx.hashes.emplace_back("reference_rule_hash", rule_hash);
    Mesh mesh{plan.fixed_mesh};
    SingleLevelConfig ref{s_ref, mesh, pts, plan.threads};
    ctx.reference = run_single_level(plan.problem, ref).estimate;
    for (std::int64_t sval : plan.grid) {
        ctx.rows.push_back(guarded_row(
            axis_name(plan.axis), static_cast<double>(sval),
            [&]() -> std::pair<double, std::uint64_t> {
                SingleLevelConfig cfg{static_cast<int>(sval), mesh, pts, plan.threads};
                EstimateResult est = run_single_level(plan.problem, cfg);
                return {std::abs(est.estimate - ctx.reference), est.work_units};
            }));
    }
    return ctx;
}

SweepContext sweep_qmc_n(const SweepPlan& plan) {
    SweepContext ctx;
    Mesh mesh{plan.fixed_mesh};
    int ref_m = plan.ref_m.value_or(static_cast<int>(plan.grid.back()) + 3);
    int ref_alpha = plan.ref_alpha.value_or(plan.alpha + 1);
    std::uint64_t ref_hash = 0;
    PointSet ref_pts = construct_points(plan.problem, plan.b, ref_m, ref_alpha,
                                        plan.fixed_s, plan.threads, &ref_hash);
    ctx.hashes.emplace_back("reference_rule_hash", ref_hash);
    SingleLevelConfig ref{plan.fixed_s, mesh, ref_pts, plan.threads};
    ctx.reference = run_single_level(plan.problem, ref).estimate;
    for (std::int64_t mval : plan.grid) {
        ctx.rows.push_back(guarded_row(
            axis_name(plan.axis),
            static_cast<double>(ipow_u64(plan.b, static_cast<unsigned>(mval))),
            [&]() -> std::pair<double, std::uint64_t> {
                PointSet pts =
                    construct_points(plan.problem, plan.b, static_cast<int>(mval),
                                     plan.alpha, plan.fixed_s, plan.threads);
                SingleLevelConfig cfg{plan.fixed_s, mesh, pts, plan.threads};
                EstimateResult est = run_single_level(plan.problem, cfg);
                return {std::abs(est.estimate - ctx.reference), est.work_units};
            }));
    }
    return ctx;
}

SweepContext sweep_ml_vs_sl(const SweepPlan& plan) {
    // Grid entries are target exponents: target = 10^{-k/4}. Each target
    // produces one multi-level and one single-level row; the fit runs on
    // the multi-level (work, error) pairs.
    SweepContext ctx;
    RateParams rates{plan.problem.p0, plan.problem.p0, 1.0, 1.0};
    ScheduleLimits limits;
    limits.b = plan.b;
    limits.alpha = plan.alpha;
    limits.coarse_mesh = plan.fixed_mesh;

    int ref_mesh = plan.ref_mesh.value_or(0);
    int ref_m_override = plan.ref_m.value_or(0);

    for (std::int64_t k : plan.grid) {
        double target = std::pow(10.0, -static_cast<double>(k) / 4.0);
        LevelSchedule ml, sl;
        try {
            ml = optimize_schedule(rates, limits, target);
            sl = optimize_schedule(rates, limits, target, 1);
        } catch (const std::exception& e) {
            for (const char* tag : {"ml", "sl"}) {
                SweepRow row;
                row.tag = tag;
                row.value = static_cast<double>(k);
                row.error = std::numeric_limits<double>::quiet_NaN();
                row.failed = true;
                row.failure = e.what();
                ctx.rows.push_back(row);
            }
            continue;
        }
        for (auto* sch : {&ml, &sl}) {
            for (const auto& lev : sch->levels)
                sch->level_points.push_back(construct_points(
                    plan.problem, plan.b, lev.m, plan.alpha, lev.s, plan.threads));
            sch->alpha = plan.alpha;
        }
        // overkill reference: digits+3, order+1, dimension x2, mesh x4
        int max_m = 0, max_mesh = 0, max_s = 0;
        for (const auto& lev : ml.levels) {
            max_m = std::max(max_m, lev.m);
            max_mesh = std::max(max_mesh, lev.mesh_m);
            max_s = std::max(max_s, lev.s);
        }
        Mesh rmesh{ref_mesh > 0 ? ref_mesh : 4 * (max_mesh + 1) - 1};
        PointSet rpts = construct_points(
            plan.problem, plan.b, ref_m_override > 0 ? ref_m_override : max_m + 3,
            plan.alpha + 1, 2 * max_s, plan.threads);
        SingleLevelConfig refc{2 * max_s, rmesh, rpts, plan.threads};
        double ref = run_single_level(plan.problem, refc).estimate;

        EstimateResult ml_res = run_multi_level(plan.problem, ml, plan.threads);
        Mesh sl_mesh{sl.levels[0].mesh_m};
        SingleLevelConfig sl_cfg{sl.levels[0].s, sl_mesh, sl.level_points[0],
                                 plan.threads};
        EstimateResult sl_res = run_single_level(plan.problem, sl_cfg);
        ctx.rows.push_back({"ml", static_cast<double>(k),
                            std::abs(ml_res.estimate - ref), ml_res.work_units, false});
        ctx.rows.push_back({"sl", static_cast<double>(k),
                            std::abs(sl_res.estimate - ref), sl_res.work_units, false});
        ctx.reference = ref;  // last target's reference, echoed for context
    }
    return ctx;
}

}  // namespace

ConvergenceReport run_sweep(const SweepPlan& plan) {
    plan.validate();
    // the reference must dominate every grid entry
    switch (plan.axis) {
        case SweepAxis::Mesh:
            if (!plan.ref_analytic &&
                plan.ref_mesh.value_or(4 * (plan.fixed_mesh + 1) - 1) <= plan.grid.back())
                throw std::invalid_argument("sweep: reference mesh does not dominate the grid");
            break;
        case SweepAxis::Truncation:
            if (plan.ref_s.value_or(2 * static_cast<int>(plan.grid.back())) <=
                plan.grid.back())
                throw std::invalid_argument("sweep: reference dimension does not dominate the grid");
            break;
        case SweepAxis::QmcN:
            if (plan.ref_m.value_or(static_cast<int>(plan.grid.back()) + 3) <=
                plan.grid.back())
                throw std::invalid_argument("sweep: reference rule does not dominate the grid");
            break;
        case SweepAxis::MlVsSl:
            break;
    }
    SweepContext ctx;
    double predicted = 0.0;
    switch (plan.axis) {
        case SweepAxis::Mesh:
            ctx = sweep_mesh(plan);
            predicted = 2.0;  // t + t'
            break;
        case SweepAxis::Truncation:
            ctx = sweep_truncation(plan);
            predicted = 2.0 * (1.0 / plan.problem.p0 - 1.0);
            break;
        case SweepAxis::QmcN:
            ctx = sweep_qmc_n(plan);
            predicted = 1.0 / plan.problem.p0;
            break;
        case SweepAxis::MlVsSl:
            ctx = sweep_ml_vs_sl(plan);
            predicted = 1.0 / plan.problem.p0;
            break;
    }

    ConvergenceReport rep;
    rep.axis = axis_name(plan.axis);
    rep.rows = std::move(ctx.rows);
    std::stable_sort(rep.rows.begin(), rep.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) {
                         return a.value < b.value;
                     });
    rep.reference = ctx.reference;
    rep.predicted_rate = predicted;
    rep.resolution_floor =
        64.0 * std::abs(ctx.reference) * std::numeric_limits<double>::epsilon();

    for (const auto& row : rep.rows) rep.all_rows_ok &= !row.failed;

    // Fit over rows above 100 x the resolution floor; abscissa is h for the
    // mesh axis (error grows with h), otherwise the axis value itself.
    std::vector<std::pair<double, double>> pts;
    for (auto& row : rep.rows) {
        if (row.failed) continue;
        if (plan.axis == SweepAxis::MlVsSl && row.tag != "ml") continue;
        if (row.error <= 100.0 * rep.resolution_floor) continue;
        double x = row.value;
        if (plan.axis == SweepAxis::Mesh) x = 1.0 / (row.value + 1.0);
        if (plan.axis == SweepAxis::MlVsSl) x = static_cast<double>(row.work);
        row.used_in_fit = true;
        pts.emplace_back(x, row.error);
    }
    try {
        rep.fit = fit_slope(pts);
    } catch (const std::invalid_argument&) {
        rep.fit.degenerate = true;
        for (auto& row : rep.rows) row.used_in_fit = false;
    }
    rep.rate = plan.axis == SweepAxis::Mesh ? rep.fit.slope : -rep.fit.slope;
    if (rep.fit.degenerate) rep.rate = 0.0;

    rep.problem_echo = serialize_problem(plan.problem);
    JsonWriter cfg;
    cfg.field("tool", std::string(kToolVersion));
    cfg.field("axis", rep.axis);
    cfg.field("b", static_cast<std::uint64_t>(plan.b));
    cfg.field("alpha", static_cast<std::int64_t>(plan.alpha));
    cfg.field("fixed_mesh", static_cast<std::int64_t>(plan.fixed_mesh));
    cfg.field("fixed_s", static_cast<std::int64_t>(plan.fixed_s));
    cfg.field("fixed_m", static_cast<std::int64_t>(plan.fixed_m));
    cfg.field("problem_hash", fnv1a(rep.problem_echo.data(), rep.problem_echo.size()));
    for (const auto& [name, hash] : ctx.hashes) cfg.field(name, hash);
    rep.config_echo = cfg.str();
    return rep;
}

std::string report_csv(const ConvergenceReport& rep) {
    std::string out = "axis,value,error,work,slope_fit\n";
    for (const auto& row : rep.rows) {
        out += row.tag + "," + format_double(row.value) + "," +
               format_double(row.error) + "," + std::to_string(row.work) + "," +
               (rep.fit.degenerate ? "degenerate" : format_double(rep.fit.slope)) +
               "\n";
    }
    return out;
}

std::string report_json(const ConvergenceReport& rep) {
    std::vector<std::string> rows;
    for (const auto& row : rep.rows) {
        JsonWriter w;
        w.field("tag", row.tag);
        w.field("value", row.value);
        w.field("error", row.error);
        w.field("work", row.work);
        w.field("used_in_fit", row.used_in_fit);
        w.field("failed", row.failed);
        if (row.failed) w.field("failure", row.failure);
        rows.push_back(w.str());
    }
    JsonWriter fit;
    fit.field("slope", rep.fit.slope);
    fit.field("half_width", rep.fit.half_width);
    fit.field("n_used", static_cast<std::int64_t>(rep.fit.n_used));
    fit.field("degenerate", rep.fit.degenerate);

    JsonWriter w;
    w.field("tool", std::string(kToolVersion));
    w.field("axis", rep.axis);
    w.field_raw("rows", JsonWriter::array(rows));
    w.field_raw("fit", fit.str());
    w.field("rate", rep.rate);
    w.field("predicted_rate", rep.predicted_rate);
    w.field("reference", rep.reference);
    w.field("resolution_floor", rep.resolution_floor);
    w.field("all_rows_ok", rep.all_rows_ok);
    w.field("problem", rep.problem_echo);
    w.field_raw("config", rep.config_echo);
    return w.str() + "\n";
}

void emit(const ConvergenceReport& rep, EmitFormat format, const std::string& path) {
    write_file(path, format == EmitFormat::Csv ? report_csv(rep) : report_json(rep));
}

}  // namespace hoqmc
