#pragma once

#include <string>
#include <utility>

#include "cma/grid.hpp"
#include "cma/report.hpp"

// Damped Newton solver for the Dirichlet problem of the real-form complex
// Monge-Ampere equation: discrete P*Q - R^2 - S^2 = 16 psi with u = 0 on the
// boundary. The initial guess solves the Poisson problem Laplace(u) = 8
// sqrt(psi); each Newton step solves the sparse linearization and halves the
// step until the residual drops AND the discrete complex Hessian stays
// positive nodewise (P > 0 and P*Q - R^2 - S^2 > 0).

namespace cma::solver {

struct NonconvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EllipticityLossError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double tol_factor = 1e-8;   // residual tolerance = tol_factor * 16 * psi
  int max_newton = 40;
  double lin_rel_tol = 1e-10;
  int lin_max_iter = 200000;
  bool heuristic = false;     // nonsmooth domains: tolerances relaxed 10x
  int threads = 1;            // affects speed only, never results
};

struct SolveReport {
  std::string status;                   // converged | damping_floor | ellipticity_loss
  int iterations = 0;                   // accepted Newton steps
  std::vector<double> residual_history; // max-norm, starting with the initial guess
  int damping_steps = 0;                // total halvings across the solve
  int psh_violations = 0;               // violating nodes at the final iterate
  int linear_iterations = 0;
  double wall_ms = 0.0;
  bool heuristic = false;
  double final_residual = 0.0;

  bool converged() const { return status == "converged"; }
};

/// Throws std::invalid_argument for psi <= 0 (degenerate equation). Damping
/// floor 2^-20; an unrecoverable positivity violation reports
/// ellipticity_loss. The returned report carries the failure mode instead of
/// throwing so callers keep the residual history.
std::pair<GridField, SolveReport> newton_solve(std::shared_ptr<const Grid4> grid,
                                               double psi, const SolverConfig& config);

/// u(x) = |x|^2 - 1 on the unit ball: the exact solution at psi = 1 whose
/// transform is v = -sqrt((1-|x|^2)/2).
double exact_ball_solution(const Vec4& x);

/// Remark-type comparison: w(x) = (A/2)(x1^2+x2^2+x3^2 - a^2 x4^2) with
/// 2A^2(1-a^2) = 1 must lie below u at every value-carrying node (the
/// subsolution property under the RHS-1 normalization psi = 1/16). Records
/// the worst violation relative to the sup-norm of u.
CertificateReport comparison_check(const GridField& u, double a, double A);

/// Fits the slope of log|u(tz)| against log t over t in {0.5, 0.4, ..., 0.1}.
double decay_probe(const GridField& u, const Vec4& z, double alpha);

/// The t^(-1/alpha)|u(tz)| samples behind the probe, ordered by decreasing t.
std::vector<double> decay_samples(const GridField& u, const Vec4& z, double alpha);

// Sparse support shared with the audits.
struct Csr {
  int n = 0;
  std::vector<std::int32_t> row_ptr, cols;
  std::vector<double> vals;
};

struct LinearSolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned BiCGStab; deterministic (the shadow residual is the
/// initial residual, no randomization anywhere).
LinearSolveStats bicgstab(const Csr& A, std::span<const double> b, std::span<double> x,
                          double rel_tol, int max_iter);

} // namespace cma::solver
