#pragma once

// Affine-parametric 1D diffusion model problem on (0,1):
//   -(a(x,y) u')' = f,  u(0) = u(1) = 0,
//   a(x,y) = a0 + sum_{j<=s} y_j * c * j^{-theta} * sin(j pi x),
// discretized with piecewise-linear FEM on a uniform mesh (midpoint
// coefficient quadrature, nodal load), solved by the Thomas algorithm.
// The quantity of interest is G(u) = int g u dx via nodal quadrature.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hoqmc {

// Load / functional weight: "const:<v>" or "sin:<k>" (sin(k pi x)).
struct FunctionSpec {
    enum class Kind { Constant, Sine } kind = Kind::Constant;
    double value = 1.0;  // constant value or sine frequency k

    double operator()(double x) const;
    static FunctionSpec parse(const std::string& text);
    std::string str() const;
};

struct AffineDiffusionProblem {
    double a0 = 1.0;      // constant nominal coefficient
    double c = 0.3;       // fluctuation amplitude
    double theta = 2.0;   // algebraic decay exponent (> 1)
    FunctionSpec f;       // load
    FunctionSpec g;       // functional weight
    double p0 = 0.5;      // nominal summability exponent, stored explicitly

    // Throws unless a0 > 0, c >= 0, theta > 1 and uniform ellipticity holds
    // over the half-width-1/2 parameter box (a0 - c/2 * sum j^-theta > 0).
    void validate() const;

    // Ellipticity floor a0 - (1/2) c sum_{j>=1} j^-theta (full tail).
    double a_min() const;
    double psi_amplitude(int j) const;  // c * j^-theta
};

struct Mesh {
    int n_interior = 1;  // M interior nodes, h = 1/(M+1)

    double h() const { return 1.0 / (n_interior + 1); }
    double node(int i) const { return (i + 1) * h(); }  // interior node i in [0, M)
    void validate() const;
};

struct AdmissibilityReport {
    double kappa = 0.0;  // sum of beta_{0,j} including the analytic tail
    double mu0 = 0.0;    // inf-sup constant of the nominal operator
    double mu = 0.0;     // (1 - kappa/2) * mu0
    bool ok = false;     // kappa < 2
};

// beta_{0,j} = |psi_j|_inf / a0 = c j^-theta / a0 for j = 1..s.
std::vector<double> beta_sequence(const AffineDiffusionProblem& problem, int s);

// kappa from the first s_max terms plus the integral-test tail bound.
AdmissibilityReport check_admissibility(const AffineDiffusionProblem& problem,
                                        int s_max);

// Just the stability arithmetic: mu = (1 - kappa/2) * mu0, ok = kappa < 2.
AdmissibilityReport admissibility_from(double kappa, double mu0);

// Nodal values of the FEM solution for parameters y in [-1/2,1/2]^s
// (s = y.size()). Throws if a non-positive element coefficient is hit.
std::vector<double> solve(const AffineDiffusionProblem& problem,
                          std::span<const double> y, const Mesh& mesh);

// G(u^h) by nodal quadrature; linear in the DOF vector.
double qoi(const AffineDiffusionProblem& problem, std::span<const double> dof,
           const Mesh& mesh);

// Reusable per-mesh workspace: caches psi_j at element midpoints so one
// solve costs O(M s) with no transcendental calls.
class SolverWorkspace {
public:
    SolverWorkspace(const AffineDiffusionProblem& problem, const Mesh& mesh, int s_max);

    // y may be shorter than s_max; missing coordinates are zero.
    void solve(std::span<const double> y, std::vector<double>& dof) const;
    double qoi(std::span<const double> dof) const;
    double qoi_of(std::span<const double> y) const;

    const Mesh& mesh() const { return mesh_; }

private:
    AffineDiffusionProblem problem_;
    Mesh mesh_;
    int s_max_;
    std::vector<double> psi_mid_;   // (M+1) x s_max, element-major
    std::vector<double> f_node_;    // h * f(x_i)
    std::vector<double> g_node_;    // h * g(x_i)
};

}  // namespace hoqmc
