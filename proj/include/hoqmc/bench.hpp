#pragma once

// Convergence sweeps and slope fitting: the reproducibility surface for
// the library. Reports embed the full configuration (problem text, rule
// hashes, mesh, reference) so any row can be re-derived from the report
// alone, and serialize byte-identically for identical inputs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hoqmc/estimators.hpp"
#include "hoqmc/pde.hpp"

namespace hoqmc {

inline constexpr const char* kToolVersion = "hoqmc 1.0.0";

enum class SweepAxis { Mesh, Truncation, QmcN, MlVsSl };

std::string axis_name(SweepAxis axis);
SweepAxis axis_from_name(const std::string& name);

struct SweepPlan {
    SweepAxis axis = SweepAxis::Mesh;
    std::vector<std::int64_t> grid;  // strictly increasing, >= 4 entries
    AffineDiffusionProblem problem;
    std::uint32_t b = 2;
    int alpha = 3;

    // frozen configuration for the non-swept axes
    int fixed_mesh = 255;
    int fixed_s = 16;
    int fixed_m = 8;  // qmc digits of the fixed rule

    // reference overrides (defaults follow the overkill convention:
    // digits + 3, order + 1, dimension x 2, mesh x 4)
    std::optional<int> ref_m;
    std::optional<int> ref_alpha;
    std::optional<int> ref_s;
    std::optional<int> ref_mesh;
    std::optional<double> ref_analytic;  // bypass: exact reference value

    int threads = 1;

    void validate() const;
};

struct SweepRow {
    std::string tag;       // axis name, or "ml"/"sl" for the paired axis
    double value = 0.0;    // axis value
    double error = 0.0;    // |estimate - reference|; NaN for failed rows
    std::uint64_t work = 0;
    bool used_in_fit = false;
    bool failed = false;   // solve failure; excluded from the fit
    std::string failure;
};

struct SlopeFit {
    double slope = 0.0;       // OLS slope on (log x, log err)
    double half_width = 0.0;  // 2 x standard error of the slope
    int n_used = 0;
    bool degenerate = false;  // fewer than 4 usable rows
};

// OLS on (log x, log err); rows with err <= 0 are filtered out. Throws if
// fewer than 4 usable rows remain (run_sweep reports that case as a
// degenerate fit instead of failing).
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& rows);

struct ConvergenceReport {
    std::string axis;
    std::vector<SweepRow> rows;       // sorted by axis value
    SlopeFit fit;                     // over rows above the resolution floor
    double rate = 0.0;                // positive decay/convergence rate
    double predicted_rate = 0.0;      // from theory at the plan's exponents
    double reference = 0.0;
    double resolution_floor = 0.0;    // 64 ulp of the reference value
    bool all_rows_ok = true;
    std::string problem_echo;         // serialized problem
    std::string config_echo;          // JSON fragment with hashes and sizes
};

ConvergenceReport run_sweep(const SweepPlan& plan);

std::string report_csv(const ConvergenceReport& report);
std::string report_json(const ConvergenceReport& report);

enum class EmitFormat { Csv, Json };
void emit(const ConvergenceReport& report, EmitFormat format, const std::string& path);

}  // namespace hoqmc
