// Python bindings for the core operations: field arithmetic, rule
// construction, point generation, the model problem and the estimators.

#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include "hoqmc/bench.hpp"
#include "hoqmc/cbc.hpp"
#include "hoqmc/estimators.hpp"
#include "hoqmc/io.hpp"
#include "hoqmc/pde.hpp"
#include "hoqmc/walsh.hpp"

namespace py = pybind11;
using namespace hoqmc;

namespace {

InterlacedRuleSpec spec_from_ints(std::uint32_t b, int m, int alpha, int s,
                                  std::uint64_t modulus,
                                  const std::vector<std::uint64_t>& gen) {
    InterlacedRuleSpec spec;
    spec.b = b;
    spec.m = m;
    spec.alpha = alpha;
    spec.s = s;
    spec.modulus = PolyFb::from_int(b, modulus);
    for (auto g : gen) spec.gen.push_back(PolyFb::from_int(b, g));
    spec.validate();
    return spec;
}

AffineDiffusionProblem problem_from_kwargs(double a0, double c, double theta,
                                           const std::string& f, const std::string& g,
                                           double p0) {
    AffineDiffusionProblem p;
    p.a0 = a0;
    p.c = c;
    p.theta = theta;
    p.f = FunctionSpec::parse(f);
    p.g = FunctionSpec::parse(g);
    p.p0 = p0;
    p.validate();
    return p;
}

}  // namespace

PYBIND11_MODULE(_hoqmc, m) {
    m.doc() = "higher-order QMC rules and estimators for affine-parametric diffusion";

    // gf arithmetic on integer-encoded polynomials
    m.def("poly_mul_mod",
          [](std::uint64_t a, std::uint64_t c, std::uint64_t p, std::uint32_t b) {
              return poly_mul_mod(PolyFb::from_int(b, a), PolyFb::from_int(b, c),
                                  PolyFb::from_int(b, p))
                  .to_int();
          },
          py::arg("a"), py::arg("c"), py::arg("modulus"), py::arg("b") = 2);
    m.def("is_irreducible",
          [](std::uint64_t p, std::uint32_t b) {
              return is_irreducible(PolyFb::from_int(b, p));
          },
          py::arg("p"), py::arg("b") = 2);
    m.def("first_irreducible",
          [](int degree, std::uint32_t b) {
              return first_irreducible(b, degree).to_int();
          },
          py::arg("degree"), py::arg("b") = 2);
    m.def("laurent_digits",
          [](std::uint64_t n, std::uint64_t q, std::uint64_t p, int w, std::uint32_t b) {
              auto d = laurent_digits(PolyFb::from_int(b, n), PolyFb::from_int(b, q),
                                      PolyFb::from_int(b, p), w);
              return std::vector<int>(d.begin(), d.end());
          },
          py::arg("n"), py::arg("q"), py::arg("modulus"), py::arg("w"),
          py::arg("b") = 2);

    m.def("dick_weight", &dick_weight, py::arg("k"), py::arg("alpha"), py::arg("b") = 2);
    m.def("walsh_eval", &walsh_eval, py::arg("k"), py::arg("numerator"),
          py::arg("ndigits"), py::arg("b") = 2);
    m.def("walsh_kernel", &walsh_kernel, py::arg("numerator"), py::arg("alpha"),
          py::arg("m"), py::arg("b") = 2);
    m.def("interlace",
          [](int alpha, std::uint32_t b, int m, const std::vector<std::uint64_t>& nums) {
              return interlace(alpha, b, m, nums);
          },
          py::arg("alpha"), py::arg("b"), py::arg("m"), py::arg("numerators"));
    m.def("spod_set_weight",
          [](const std::vector<int>& u, int alpha, const std::vector<double>& beta) {
              SPODWeightSpec w{alpha, beta};
              return spod_set_weight(u, w);
          },
          py::arg("u"), py::arg("alpha"), py::arg("beta"));

    py::class_<InterlacedRuleSpec>(m, "RuleSpec")
        .def_readonly("b", &InterlacedRuleSpec::b)
        .def_readonly("m", &InterlacedRuleSpec::m)
        .def_readonly("alpha", &InterlacedRuleSpec::alpha)
        .def_readonly("s", &InterlacedRuleSpec::s)
        .def_property_readonly("modulus",
                               [](const InterlacedRuleSpec& s) { return s.modulus.to_int(); })
        .def_property_readonly("gen",
                               [](const InterlacedRuleSpec& s) {
                                   std::vector<std::uint64_t> g;
                                   for (const auto& q : s.gen) g.push_back(q.to_int());
                                   return g;
                               })
        .def("serialize", &serialize_rule_spec)
        .def("__repr__", [](const InterlacedRuleSpec& s) {
            return "<RuleSpec b=" + std::to_string(s.b) + " m=" + std::to_string(s.m) +
                   " alpha=" + std::to_string(s.alpha) + " s=" + std::to_string(s.s) + ">";
        });

    py::class_<PointSet>(m, "PointSet")
        .def_readonly("b", &PointSet::b)
        .def_readonly("m", &PointSet::m)
        .def_readonly("alpha", &PointSet::alpha)
        .def_readonly("s", &PointSet::s)
        .def_readonly("denominator", &PointSet::denominator)
        .def_property_readonly("n", &PointSet::size)
        .def("numerator", &PointSet::at, py::arg("n"), py::arg("j"))
        .def("value", &PointSet::value, py::arg("n"), py::arg("j"))
        .def("row", [](const PointSet& ps, std::uint64_t n) {
            std::vector<double> row(ps.s);
            for (int j = 0; j < ps.s; ++j) row[j] = ps.value(n, j);
            return row;
        });

    m.def("cbc_construct",
          [](std::uint32_t b, int m, int alpha, int s, const std::vector<double>& beta,
             int threads) {
              SPODWeightSpec w{alpha, beta};
              CbcOptions opts;
              opts.threads = threads;
              return cbc_construct(b, m, alpha, s, w, opts);
          },
          py::arg("b"), py::arg("m"), py::arg("alpha"), py::arg("s"), py::arg("beta"),
          py::arg("threads") = 1);
    m.def("cbc_criterion",
          [](const std::vector<std::vector<std::uint64_t>>& columns, int alpha, int m,
             std::uint32_t b, const std::vector<double>& beta) {
              SPODWeightSpec w{alpha, beta};
              return cbc_criterion(columns, alpha, m, b, w);
          },
          py::arg("columns"), py::arg("alpha"), py::arg("m"), py::arg("b"),
          py::arg("beta"));
    m.def("generate_points", &generate_points, py::arg("spec"));
    m.def("rule_spec", &spec_from_ints, py::arg("b"), py::arg("m"), py::arg("alpha"),
          py::arg("s"), py::arg("modulus"), py::arg("gen"));
    m.def("parse_rule_spec", &parse_rule_spec, py::arg("text"));

    py::class_<AffineDiffusionProblem>(m, "Problem")
        .def(py::init(&problem_from_kwargs), py::arg("a0") = 1.0, py::arg("c") = 0.3,
             py::arg("theta") = 2.0, py::arg("f") = "const:1", py::arg("g") = "const:1",
             py::arg("p0") = 0.5)
        .def_readonly("a0", &AffineDiffusionProblem::a0)
        .def_readonly("c", &AffineDiffusionProblem::c)
        .def_readonly("theta", &AffineDiffusionProblem::theta)
        .def_readonly("p0", &AffineDiffusionProblem::p0)
        .def("serialize", &serialize_problem);

    py::class_<AdmissibilityReport>(m, "AdmissibilityReport")
        .def_readonly("kappa", &AdmissibilityReport::kappa)
        .def_readonly("mu0", &AdmissibilityReport::mu0)
        .def_readonly("mu", &AdmissibilityReport::mu)
        .def_readonly("ok", &AdmissibilityReport::ok);

    m.def("beta_sequence", &beta_sequence, py::arg("problem"), py::arg("s"));
    m.def("check_admissibility", &check_admissibility, py::arg("problem"),
          py::arg("s_max") = 1000);
    m.def("admissibility_from", &admissibility_from, py::arg("kappa"), py::arg("mu0"));
    m.def("solve",
          [](const AffineDiffusionProblem& p, const std::vector<double>& y, int mesh_m) {
              return solve(p, y, Mesh{mesh_m});
          },
          py::arg("problem"), py::arg("y"), py::arg("M"));
    m.def("qoi",
          [](const AffineDiffusionProblem& p, const std::vector<double>& dof, int mesh_m) {
              return qoi(p, dof, Mesh{mesh_m});
          },
          py::arg("problem"), py::arg("dof"), py::arg("M"));

    m.def("run_single_level",
          [](const AffineDiffusionProblem& p, int s, int mesh_m, const PointSet& pts,
             int threads) {
              SingleLevelConfig cfg{s, Mesh{mesh_m}, pts, threads};
              EstimateResult r = run_single_level(p, cfg);
              return py::make_tuple(r.estimate, r.work_units);
          },
          py::arg("problem"), py::arg("s"), py::arg("M"), py::arg("points"),
          py::arg("threads") = 1);
    m.def("mc_baseline",
          [](const AffineDiffusionProblem& p, int s, int mesh_m, std::uint64_t n,
             std::uint64_t seed, int threads) {
              McResult r = mc_baseline(p, s, Mesh{mesh_m}, n, seed, threads);
              return py::make_tuple(r.estimate, r.std_error, r.work_units);
          },
          py::arg("problem"), py::arg("s"), py::arg("M"), py::arg("N"), py::arg("seed"),
          py::arg("threads") = 1);
    py::class_<Level>(m, "Level")
        .def_readonly("M", &Level::mesh_m)
        .def_readonly("s", &Level::s)
        .def_readonly("m", &Level::m)
        .def("__repr__", [](const Level& l) {
            return "<Level M=" + std::to_string(l.mesh_m) + " s=" + std::to_string(l.s) +
                   " m=" + std::to_string(l.m) + ">";
        });
    py::class_<LevelSchedule>(m, "LevelSchedule")
        .def_readonly("b", &LevelSchedule::b)
        .def_readonly("alpha", &LevelSchedule::alpha)
        .def_readonly("levels", &LevelSchedule::levels)
        .def("serialize", &serialize_schedule);
    m.def("optimize_schedule",
          [](double p0, double p_t, double t, double t_prime, double target,
             std::uint32_t b, int alpha, int coarse_mesh, int force_levels) {
              RateParams rates{p0, p_t, t, t_prime};
              ScheduleLimits limits;
              limits.b = b;
              limits.alpha = alpha;
              limits.coarse_mesh = coarse_mesh;
              return optimize_schedule(rates, limits, target, force_levels);
          },
          py::arg("p0"), py::arg("p_t"), py::arg("t"), py::arg("t_prime"),
          py::arg("target"), py::arg("b") = 2, py::arg("alpha") = 3,
          py::arg("coarse_mesh") = 63, py::arg("force_levels") = 0);
    m.def("schedule_bound",
          [](const LevelSchedule& sch, double p0, double p_t, double t, double t_prime) {
              return schedule_bound(sch, RateParams{p0, p_t, t, t_prime});
          },
          py::arg("schedule"), py::arg("p0"), py::arg("p_t"), py::arg("t"),
          py::arg("t_prime"));
    m.def("run_multi_level",
          [](const AffineDiffusionProblem& p, LevelSchedule sch,
             const std::vector<PointSet>& level_points, int threads) {
              sch.level_points = level_points;
              EstimateResult r = run_multi_level(p, sch, threads);
              return py::make_tuple(r.estimate, r.work_units);
          },
          py::arg("problem"), py::arg("schedule"), py::arg("level_points"),
          py::arg("threads") = 1);
    m.def("truncation_tail_bound",
          [](const std::vector<double>& beta, int s, double p0) {
              TailBound tb = truncation_tail_bound(beta, s, p0);
              return py::make_tuple(tb.explicit_tail, tb.bound, tb.qoi_bound);
          },
          py::arg("beta"), py::arg("s"), py::arg("p0"));
    m.def("fit_slope",
          [](const std::vector<std::pair<double, double>>& rows) {
              SlopeFit f = fit_slope(rows);
              return py::make_tuple(f.slope, f.half_width);
          },
          py::arg("rows"));

    m.attr("__version__") = "1.0.0";
}
