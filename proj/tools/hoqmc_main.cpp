// hoqmc command line: rule construction, point generation, model checks,
// estimator runs and convergence sweeps.

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hoqmc/bench.hpp"
#include "hoqmc/cbc.hpp"
#include "hoqmc/estimators.hpp"
#include "hoqmc/io.hpp"
#include "hoqmc/util.hpp"

namespace {

using namespace hoqmc;

AffineDiffusionProblem load_problem(const std::string& path) {
    return parse_problem(read_file(path));
}

PointSet points_for_spec_file(const std::string& path) {
    std::string text = read_file(path);
    InterlacedRuleSpec spec = parse_rule_spec(text);
    // Accept either a bare rule spec or a full point-set file: look for a
    // non-empty row after the two header lines.
    std::istringstream iss(text);
    std::string line;
    std::getline(iss, line);
    std::getline(iss, line);
    while (std::getline(iss, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            return parse_point_set(text);
    return generate_points(spec);
}

std::string estimate_report_json(const AffineDiffusionProblem& problem,
                                 const EstimateResult& res,
                                 const std::string& kind,
                                 const std::string& config_json,
                                 const ErrorBreakdown* breakdown) {
    JsonWriter w;
    w.field("tool", std::string(kToolVersion));
    w.field("kind", kind);
    w.field("estimate", res.estimate);
    w.field("work_units", res.work_units);
    if (breakdown) {
        JsonWriter bd;
        bd.field("truncation", breakdown->truncation);
        bd.field("integration", breakdown->integration);
        bd.field("pg", breakdown->pg);
        bd.field("total", breakdown->total);
        bd.field("reference", breakdown->reference);
        w.field_raw("breakdown", bd.str());
    }
    std::string prob = serialize_problem(problem);
    w.field("problem", prob);
    w.field_raw("config", config_json);
    return w.str() + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"higher-order QMC rules and estimators for parametric diffusion"};
    app.require_subcommand(1);
    int threads = 2;
    app.add_option("--threads", threads, "worker threads (results are thread-count independent)");

    // construct
    auto* construct = app.add_subcommand("construct", "CBC-construct an interlaced rule");
    std::uint32_t c_b = 2;
    int c_m = 8, c_alpha = 2, c_s = 4;
    std::string c_beta_file, c_out = "rule.spec";
    construct->add_option("--b", c_b, "prime base");
    construct->add_option("--m", c_m, "digits, N = b^m")->required();
    construct->add_option("--alpha", c_alpha, "interlacing order")->required();
    construct->add_option("--s", c_s, "parametric dimension")->required();
    construct->add_option("--beta-file", c_beta_file, "weight sequence file")->required();
    construct->add_option("--out", c_out, "output rule-spec file");

    // points
    auto* points = app.add_subcommand("points", "expand a rule spec into a point-set file");
    std::string p_spec, p_out = "points.txt";
    points->add_option("--spec-file", p_spec)->required();
    points->add_option("--out", p_out)->required();

    // pde-check
    auto* pde_check = app.add_subcommand("pde-check", "admissibility report as JSON");
    std::string pc_problem;
    int pc_smax = 1000;
    pde_check->add_option("--problem-file", pc_problem)->required();
    pde_check->add_option("--s-max", pc_smax, "terms before the analytic tail");

    // run-single
    auto* run_single = app.add_subcommand("run-single", "single-level QMC estimate");
    std::string rs_problem, rs_spec, rs_out = "report.json";
    int rs_mesh = 255, rs_s = 0;
    std::string rs_ref_spec;
    int rs_ref_mesh = 0, rs_ref_s = 0;
    run_single->add_option("--problem-file", rs_problem)->required();
    run_single->add_option("--spec-file", rs_spec)->required();
    run_single->add_option("--M", rs_mesh, "interior mesh nodes")->required();
    run_single->add_option("--s", rs_s, "truncation dimension (default: rule dimension)");
    run_single->add_option("--out", rs_out);
    run_single->add_option("--ref-spec-file", rs_ref_spec, "overkill rule for the error breakdown");
    run_single->add_option("--ref-M", rs_ref_mesh);
    run_single->add_option("--ref-s", rs_ref_s);

    // run-ml
    auto* run_ml = app.add_subcommand("run-ml", "multi-level QMC estimate");
    std::string ml_problem, ml_schedule, ml_out = "report.json";
    run_ml->add_option("--problem-file", ml_problem)->required();
    run_ml->add_option("--schedule-file", ml_schedule)->required();
    run_ml->add_option("--out", ml_out);

    // schedule
    auto* schedule = app.add_subcommand("schedule", "optimize a level schedule for a target error");
    std::string sc_problem, sc_out = "schedule.json";
    double sc_target = 1e-4;
    int sc_alpha = 0, sc_coarse = 63, sc_levels = 0;
    schedule->add_option("--problem-file", sc_problem)->required();
    schedule->add_option("--target", sc_target)->required();
    schedule->add_option("--alpha", sc_alpha, "rule order (default floor(1/p0)+1)");
    schedule->add_option("--coarse-M", sc_coarse, "coarsest mesh");
    schedule->add_option("--levels", sc_levels, "force level count (0 = free)");
    schedule->add_option("--out", sc_out);

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo baseline");
    std::string mc_problem, mc_out;
    std::uint64_t mc_n = 1024, mc_seed = 1;
    int mc_s = 16, mc_mesh = 255;
    mc->add_option("--problem-file", mc_problem)->required();
    mc->add_option("--N", mc_n)->required();
    mc->add_option("--seed", mc_seed)->required();
    mc->add_option("--s", mc_s);
    mc->add_option("--M", mc_mesh);
    mc->add_option("--out", mc_out, "write the report here instead of stdout");

    // bench
    auto* bench = app.add_subcommand("bench", "convergence sweep from a plan file");
    std::string bn_plan, bn_out = ".";
    bench->add_option("--plan", bn_plan)->required();
    bench->add_option("--out", bn_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*construct) {
            SPODWeightSpec weights;
            weights.alpha = c_alpha;
            weights.beta = parse_beta_file(read_file(c_beta_file));
            if (weights.beta.size() < static_cast<std::size_t>(c_s))
                throw std::runtime_error("beta file has fewer than s entries");
            weights.beta.resize(c_s);
            CbcOptions opts;
            opts.threads = threads;
            InterlacedRuleSpec spec = cbc_construct(c_b, c_m, c_alpha, c_s, weights, opts);
            write_file(c_out, serialize_rule_spec(spec));
            std::printf("wrote %s\n", c_out.c_str());
        } else if (*points) {
            std::string text = read_file(p_spec);
            InterlacedRuleSpec spec = parse_rule_spec(text);
            PointSet pts = generate_points(spec);
            write_file(p_out, serialize_point_set(spec, pts));
            std::printf("wrote %s (%llu points)\n", p_out.c_str(),
                        static_cast<unsigned long long>(pts.size()));
        } else if (*pde_check) {
            AffineDiffusionProblem problem = load_problem(pc_problem);
            AdmissibilityReport rep = check_admissibility(problem, pc_smax);
            std::fputs(admissibility_json(rep).c_str(), stdout);
        } else if (*run_single) {
            AffineDiffusionProblem problem = load_problem(rs_problem);
            PointSet pts = points_for_spec_file(rs_spec);
            SingleLevelConfig cfg{rs_s > 0 ? rs_s : pts.s, Mesh{rs_mesh}, pts, threads};
            EstimateResult res = run_single_level(problem, cfg);
            ErrorBreakdown bd;
            bool have_bd = false;
            if (!rs_ref_spec.empty()) {
                PointSet ref_pts = points_for_spec_file(rs_ref_spec);
                ReferenceConfig ref{rs_ref_s > 0 ? rs_ref_s : ref_pts.s,
                                    Mesh{rs_ref_mesh > 0 ? rs_ref_mesh : rs_mesh},
                                    ref_pts, threads};
                bd = error_breakdown(problem, cfg, ref);
                have_bd = true;
            }
            JsonWriter cfg_json;
            cfg_json.field("s", static_cast<std::int64_t>(cfg.s));
            cfg_json.field("M", static_cast<std::int64_t>(rs_mesh));
            std::string spec_text = read_file(rs_spec);
            cfg_json.field("spec_hash", fnv1a(spec_text.data(), spec_text.size()));
            std::string rep = estimate_report_json(problem, res, "single-level",
                                                   cfg_json.str(),
                                                   have_bd ? &bd : nullptr);
            write_file(rs_out, rep);
            std::printf("estimate %.17g (work %llu) -> %s\n", res.estimate,
                        static_cast<unsigned long long>(res.work_units), rs_out.c_str());
        } else if (*run_ml) {
            AffineDiffusionProblem problem = load_problem(ml_problem);
            LevelSchedule sch = parse_schedule(read_file(ml_schedule));
            SPODWeightSpec weights;
            for (auto& lev : sch.levels) {
                weights.alpha = sch.alpha;
                weights.beta = beta_sequence(problem, lev.s);
                CbcOptions opts;
                opts.threads = threads;
                InterlacedRuleSpec spec =
                    cbc_construct(sch.b, lev.m, sch.alpha, lev.s, weights, opts);
                sch.level_points.push_back(generate_points(spec));
            }
            EstimateResult res = run_multi_level(problem, sch, threads);
            JsonWriter cfg_json;
            cfg_json.field("levels", static_cast<std::int64_t>(sch.levels.size()));
            std::string sch_text = serialize_schedule(sch);
            cfg_json.field("schedule_hash", fnv1a(sch_text.data(), sch_text.size()));
            std::string rep = estimate_report_json(problem, res, "multi-level",
                                                   cfg_json.str(), nullptr);
            write_file(ml_out, rep);
            std::printf("estimate %.17g (work %llu) -> %s\n", res.estimate,
                        static_cast<unsigned long long>(res.work_units), ml_out.c_str());
        } else if (*schedule) {
            AffineDiffusionProblem problem = load_problem(sc_problem);
            RateParams rates{problem.p0, problem.p0, 1.0, 1.0};
            ScheduleLimits limits;
            limits.alpha = sc_alpha > 0
                               ? sc_alpha
                               : static_cast<int>(1.0 / problem.p0) + 1;
            limits.coarse_mesh = sc_coarse;
            LevelSchedule sch = optimize_schedule(rates, limits, sc_target, sc_levels);
            write_file(sc_out, serialize_schedule(sch));
            std::printf("wrote %s (%zu levels, bound %.3g)\n", sc_out.c_str(),
                        sch.levels.size(), schedule_bound(sch, rates));
        } else if (*mc) {
            AffineDiffusionProblem problem = load_problem(mc_problem);
            McResult res = mc_baseline(problem, mc_s, Mesh{mc_mesh}, mc_n, mc_seed, threads);
            JsonWriter w;
            w.field("tool", std::string(kToolVersion));
            w.field("kind", std::string("mc"));
            w.field("estimate", res.estimate);
            w.field("std_error", res.std_error);
            w.field("work_units", res.work_units);
            w.field("seed", mc_seed);
            w.field("N", mc_n);
            std::string rep = w.str() + "\n";
            if (mc_out.empty())
                std::fputs(rep.c_str(), stdout);
            else
                write_file(mc_out, rep);
        } else if (*bench) {
            auto kv = parse_kv_file(read_file(bn_plan));
            auto get = [&](const char* a, const char* b_) -> std::string {
                if (kv.count(a)) return kv[a];
                if (kv.count(b_)) return kv[b_];
                return {};
            };
            SweepPlan plan;
            plan.axis = axis_from_name(get("axis", "axis"));
            std::string grid_text = get("grid", "grid");
            {
                std::string item;
                for (char ch : grid_text + ",") {
                    if (ch == ',' || ch == ' ') {
                        if (!item.empty()) plan.grid.push_back(std::stoll(item));
                        item.clear();
                    } else {
                        item += ch;
                    }
                }
            }
            std::string prob_path = get("problem-file", "problem_file");
            if (prob_path.empty()) throw std::runtime_error("plan: missing problem-file");
            plan.problem = load_problem(prob_path);
            if (!get("alpha", "alpha").empty()) plan.alpha = std::stoi(kv["alpha"]);
            if (!get("b", "b").empty()) plan.b = std::stoul(kv["b"]);
            if (!get("M", "M").empty()) plan.fixed_mesh = std::stoi(kv["M"]);
            if (!get("s", "s").empty()) plan.fixed_s = std::stoi(kv["s"]);
            if (!get("m", "m").empty()) plan.fixed_m = std::stoi(kv["m"]);
            if (!get("ref-m", "ref_m").empty()) plan.ref_m = std::stoi(get("ref-m", "ref_m"));
            if (!get("ref-alpha", "ref_alpha").empty())
                plan.ref_alpha = std::stoi(get("ref-alpha", "ref_alpha"));
            if (!get("ref-s", "ref_s").empty()) plan.ref_s = std::stoi(get("ref-s", "ref_s"));
            if (!get("ref-M", "ref_M").empty()) plan.ref_mesh = std::stoi(get("ref-M", "ref_M"));
            if (!get("ref-analytic", "ref_analytic").empty())
                plan.ref_analytic = std::stod(get("ref-analytic", "ref_analytic"));
            plan.threads = threads;

            ConvergenceReport rep = run_sweep(plan);
            std::filesystem::create_directories(bn_out);
            emit(rep, EmitFormat::Csv, bn_out + "/report.csv");
            emit(rep, EmitFormat::Json, bn_out + "/report.json");
            std::printf("axis %s: rate %.3f (predicted %.3f)%s -> %s\n",
                        rep.axis.c_str(), rep.rate, rep.predicted_rate,
                        rep.fit.degenerate ? " [degenerate]" : "", bn_out.c_str());
            if (!rep.all_rows_ok) {
                std::fprintf(stderr, "error: some sweep rows failed\n");
                return 1;
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
