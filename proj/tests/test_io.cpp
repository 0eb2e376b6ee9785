#include <doctest.h>

#include "hoqmc/cbc.hpp"
#include "hoqmc/io.hpp"

using namespace hoqmc;

TEST_CASE("rule spec and point set files round trip bit-exactly") {
    SPODWeightSpec w{2, {0.5, 0.25}};
    InterlacedRuleSpec spec = cbc_construct(2, 3, 2, 2, w);
    std::string spec_text = serialize_rule_spec(spec);
    CHECK(spec_text.rfind("hoqmc-pointset v1\n", 0) == 0);

    InterlacedRuleSpec back = parse_rule_spec(spec_text);
    CHECK(serialize_rule_spec(back) == spec_text);
    CHECK(back.modulus.to_int() == spec.modulus.to_int());
    REQUIRE(back.gen.size() == spec.gen.size());

    PointSet pts = generate_points(spec);
    std::string pts_text = serialize_point_set(spec, pts);
    PointSet pback = parse_point_set(pts_text);
    CHECK(pback.coords == pts.coords);
    CHECK(pback.denominator == pts.denominator);
    CHECK(serialize_point_set(back, pback) == pts_text);
}

TEST_CASE("pointset parser rejects corrupted input") {
    CHECK_THROWS(parse_rule_spec("wrong magic\nb=2 m=1 alpha=1 s=1 N=2 modulus=2 gen=1\n"));
    CHECK_THROWS(parse_rule_spec("hoqmc-pointset v1\nb=2 m=1 alpha=1 s=1 N=4 modulus=2 gen=1\n"));
    CHECK_THROWS(parse_rule_spec("hoqmc-pointset v1\nb=2 m=1 alpha=1 s=1 N=2 gen=1\n"));
    // truncated rows
    SPODWeightSpec w{1, {0.5}};
    InterlacedRuleSpec spec = cbc_construct(2, 2, 1, 1, w);
    PointSet pts = generate_points(spec);
    std::string text = serialize_point_set(spec, pts);
    CHECK_THROWS(parse_point_set(text.substr(0, text.size() - 3)));
}

TEST_CASE("problem files parse with defaults and round trip") {
    AffineDiffusionProblem p = parse_problem(
        "# sample\n"
        "a0 = 1.5\n"
        "c = 0.2\n"
        "theta = 2.5\n"
        "f = \"sin:1\"\n"
        "g = \"const:2\"\n"
        "p0 = 0.45\n");
    CHECK(p.a0 == 1.5);
    CHECK(p.c == 0.2);
    CHECK(p.theta == 2.5);
    CHECK(p.p0 == 0.45);
    CHECK(p.f.kind == FunctionSpec::Kind::Sine);
    CHECK(p.g(0.0) == 2.0);

    AffineDiffusionProblem again = parse_problem(serialize_problem(p));
    CHECK(serialize_problem(again) == serialize_problem(p));

    AffineDiffusionProblem defaults = parse_problem("");
    CHECK(defaults.a0 == 1.0);
    CHECK(defaults.theta == 2.0);

    CHECK_THROWS(parse_problem("theta = 0.5\n"));
}

TEST_CASE("beta files and schedule json") {
    auto beta = parse_beta_file("0.5\n0.25 # comment\n\n0.125\n");
    CHECK(beta == std::vector<double>{0.5, 0.25, 0.125});
    CHECK_THROWS(parse_beta_file("# nothing\n"));

    LevelSchedule sch;
    sch.b = 2;
    sch.alpha = 3;
    sch.levels = {{63, 8, 9}, {127, 16, 8}};
    std::string text = serialize_schedule(sch);
    LevelSchedule back = parse_schedule(text);
    CHECK(back.levels.size() == 2);
    CHECK(back.levels[1].mesh_m == 127);
    CHECK(back.levels[1].s == 16);
    CHECK(serialize_schedule(back) == text);
}

TEST_CASE("format_double keeps 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    double v = 1.0 / 3.0;
    CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("admissibility json is stable") {
    AdmissibilityReport rep;
    rep.kappa = 1.0;
    rep.mu0 = 2.0;
    rep.mu = 1.0;
    rep.ok = true;
    CHECK(admissibility_json(rep) ==
          "{\"kappa\":1,\"mu0\":2,\"mu\":1,\"ok\":true}\n");
}
