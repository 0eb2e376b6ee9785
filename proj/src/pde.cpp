#include "hoqmc/pde.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hoqmc/util.hpp"

namespace hoqmc {

double FunctionSpec::operator()(double x) const {
    if (kind == Kind::Constant) return value;
    return std::sin(value * std::numbers::pi * x);
}

FunctionSpec FunctionSpec::parse(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("FunctionSpec: expected const:<v> or sin:<k>");
    std::string head = text.substr(0, colon);
    double v = std::stod(text.substr(colon + 1));
    FunctionSpec fs;
    if (head == "const") {
        fs.kind = Kind::Constant;
    } else if (head == "sin") {
        fs.kind = Kind::Sine;
    } else {
        throw std::invalid_argument("FunctionSpec: unknown kind '" + head + "'");
    }
    fs.value = v;
    return fs;
}

std::string FunctionSpec::str() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s:%.17g",
                  kind == Kind::Constant ? "const" : "sin", value);
    return buf;
}

double AffineDiffusionProblem::psi_amplitude(int j) const {
    return c * std::pow(static_cast<double>(j), -theta);
}

double AffineDiffusionProblem::a_min() const {
    // sum_{j>=1} j^-theta <= 1 + integral tail = 1 + 1/(theta-1)
    double zeta_bound = 1.0 + 1.0 / (theta - 1.0);
    return a0 - 0.5 * c * zeta_bound;
}

void AffineDiffusionProblem::validate() const {
    if (!(a0 > 0.0)) throw std::invalid_argument("problem: a0 must be positive");
    if (!(c >= 0.0)) throw std::invalid_argument("problem: c must be non-negative");
    if (!(theta > 1.0)) throw std::invalid_argument("problem: theta must exceed 1");
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::invalid_argument("problem: p0 must lie in (0,1)");
    if (!(a_min() > 0.0))
        throw std::invalid_argument("problem: uniform ellipticity violated");
}

void Mesh::validate() const {
    if (n_interior < 1) throw std::invalid_argument("mesh: need at least one node");
}

std::vector<double> beta_sequence(const AffineDiffusionProblem& problem, int s) {
    problem.validate();
    std::vector<double> beta(s);
    for (int j = 1; j <= s; ++j) beta[j - 1] = problem.psi_amplitude(j) / problem.a0;
    return beta;
}

AdmissibilityReport admissibility_from(double kappa, double mu0) {
    AdmissibilityReport rep;
    rep.kappa = kappa;
    rep.mu0 = mu0;
    rep.mu = (1.0 - kappa / 2.0) * mu0;
    rep.ok = kappa < 2.0;
    return rep;
}

AdmissibilityReport check_admissibility(const AffineDiffusionProblem& problem,
                                        int s_max) {
    if (!(problem.a0 > 0.0) || !(problem.theta > 1.0))
        throw std::invalid_argument("check_admissibility: invalid problem");
    Kahan kappa;
    for (int j = 1; j <= s_max; ++j) kappa.add(problem.psi_amplitude(j) / problem.a0);
    // analytic tail: sum_{j>s} j^-theta <= s^{1-theta}/(theta-1)
    double tail = s_max >= 1
                      ? std::pow(static_cast<double>(s_max), 1.0 - problem.theta) /
                            (problem.theta - 1.0)
                      : 1.0 + 1.0 / (problem.theta - 1.0);
    kappa.add(problem.c / problem.a0 * tail);
    return admissibility_from(kappa.value(), problem.a0);
}

namespace {

// Tridiagonal SPD solve (Thomas algorithm), in place on copies.
void thomas(std::vector<double>& diag, std::vector<double>& off,
            std::vector<double>& rhs, std::vector<double>& out) {
    std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        double w = off[i - 1] / diag[i - 1];
        diag[i] -= w * off[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    out.resize(n);
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        out[i] = (rhs[i] - off[i] * out[i + 1]) / diag[i];
}

}  // namespace

SolverWorkspace::SolverWorkspace(const AffineDiffusionProblem& problem,
                                 const Mesh& mesh, int s_max)
    : problem_(problem), mesh_(mesh), s_max_(s_max) {
    problem.validate();
    mesh.validate();
    if (s_max < 0) throw std::invalid_argument("SolverWorkspace: s_max < 0");
    int m = mesh.n_interior;
    int ne = m + 1;
    double h = mesh.h();
    psi_mid_.resize(static_cast<std::size_t>(ne) * s_max);
    for (int e = 0; e < ne; ++e) {
        double xm = (e + 0.5) * h;
        for (int j = 1; j <= s_max; ++j)
            psi_mid_[static_cast<std::size_t>(e) * s_max + (j - 1)] =
                problem.psi_amplitude(j) * std::sin(j * std::numbers::pi * xm);
    }
    f_node_.resize(m);
    g_node_.resize(m);
    for (int i = 0; i < m; ++i) {
        f_node_[i] = h * problem.f(mesh.node(i));
        g_node_[i] = h * problem.g(mesh.node(i));
    }
}

void SolverWorkspace::solve(std::span<const double> y, std::vector<double>& dof) const {
    int m = mesh_.n_interior;
    int ne = m + 1;
    double h = mesh_.h();
    int s = static_cast<int>(std::min<std::size_t>(y.size(), s_max_));
    if (y.size() > static_cast<std::size_t>(s_max_))
        throw std::invalid_argument("SolverWorkspace: y longer than workspace s_max");

    // Element coefficient at midpoints, compensated over the fixed j order.
    std::vector<double> a_el(ne);
    for (int e = 0; e < ne; ++e) {
        Kahan acc;
        acc.add(problem_.a0);
        const double* psi = &psi_mid_[static_cast<std::size_t>(e) * s_max_];
        for (int j = 0; j < s; ++j) acc.add(y[j] * psi[j]);
        a_el[e] = acc.value();
        if (!(a_el[e] > 0.0))
            throw std::runtime_error("solve: non-positive coefficient in element " +
                                     std::to_string(e));
    }
    std::vector<double> diag(m), off(m > 1 ? m - 1 : 0), rhs(f_node_);
    for (int i = 0; i < m; ++i) diag[i] = (a_el[i] + a_el[i + 1]) / h;
    for (int i = 0; i + 1 < m; ++i) off[i] = -a_el[i + 1] / h;
    thomas(diag, off, rhs, dof);
}

double SolverWorkspace::qoi(std::span<const double> dof) const {
    if (dof.size() != g_node_.size())
        throw std::invalid_argument("qoi: mesh mismatch");
    Kahan acc;
    for (std::size_t i = 0; i < dof.size(); ++i) acc.add(g_node_[i] * dof[i]);
    return acc.value();
}

double SolverWorkspace::qoi_of(std::span<const double> y) const {
    std::vector<double> dof;
    solve(y, dof);
    return qoi(dof);
}

std::vector<double> solve(const AffineDiffusionProblem& problem,
                          std::span<const double> y, const Mesh& mesh) {
    SolverWorkspace ws(problem, mesh, static_cast<int>(y.size()));
    std::vector<double> dof;
    ws.solve(y, dof);
    return dof;
}

double qoi(const AffineDiffusionProblem& problem, std::span<const double> dof,
           const Mesh& mesh) {
    SolverWorkspace ws(problem, mesh, 0);
    return ws.qoi(dof);
}

}  // namespace hoqmc
