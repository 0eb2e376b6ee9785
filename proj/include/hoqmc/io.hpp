#pragma once

// File formats and deterministic serialization. Emitted artifacts must be
// byte-identical across runs and thread counts, so every number is printed
// with 17 significant digits through one code path.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hoqmc/estimators.hpp"
#include "hoqmc/pde.hpp"
#include "hoqmc/rule.hpp"

namespace hoqmc {

// %.17g with a locale-independent decimal point.
std::string format_double(double v);

// Minimal ordered JSON writer (insertion order preserved); values are
// pre-formatted scalars or nested nodes.
class JsonWriter {
public:
    JsonWriter& field(const std::string& key, const std::string& str_value);
    JsonWriter& field(const std::string& key, double v);
    JsonWriter& field(const std::string& key, std::int64_t v);
    JsonWriter& field(const std::string& key, std::uint64_t v);
    JsonWriter& field(const std::string& key, bool v);
    JsonWriter& field_raw(const std::string& key, const std::string& raw_json);
    std::string str() const;

    static std::string array(const std::vector<std::string>& raw_items);
    static std::string escape(const std::string& s);

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

// --- point-set / rule-spec files ------------------------------------------
// Line 1: "hoqmc-pointset v1"
// Line 2: "b=.. m=.. alpha=.. s=.. N=.. modulus=<int> gen=<int,int,...>"
// Then optionally N lines of s numerators (over b^{alpha*m}).
std::string serialize_rule_spec(const InterlacedRuleSpec& spec);
std::string serialize_point_set(const InterlacedRuleSpec& spec, const PointSet& pts);
InterlacedRuleSpec parse_rule_spec(const std::string& text);
PointSet parse_point_set(const std::string& text);

// --- problem description files ---------------------------------------------
// TOML-style "key = value" lines; keys a0, c, theta, f, g, p0; '#' comments.
AffineDiffusionProblem parse_problem(const std::string& text);
std::string serialize_problem(const AffineDiffusionProblem& problem);

// Generic "key = value" reader shared by problem and plan files.
std::map<std::string, std::string> parse_kv_file(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Beta files: one positive number per line, '#' comments allowed.
std::vector<double> parse_beta_file(const std::string& text);

// Schedule files (JSON): {"b":..,"alpha":..,"levels":[{"M":..,"s":..,"m":..},..]}
LevelSchedule parse_schedule(const std::string& text);
std::string serialize_schedule(const LevelSchedule& schedule);

std::string admissibility_json(const AdmissibilityReport& report);

}  // namespace hoqmc
