#include "cma/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "cma/kernels.hpp"

namespace cma::solver {

namespace {

// Column pattern of one unknown: self, axis neighbors, diagonal neighbors.
void collect_columns(const Grid4& grid, int r, std::vector<std::int32_t>& cols) {
  cols.clear();
  cols.push_back(r);
  for (const auto& arm : grid.axis[static_cast<std::size_t>(r)]) {
    if (arm.nb_plus >= 0) cols.push_back(arm.nb_plus);
    if (arm.nb_minus >= 0) cols.push_back(arm.nb_minus);
  }
  for (const auto& arm : grid.diag[static_cast<std::size_t>(r)]) {
    if (arm.nb_plus >= 0) cols.push_back(arm.nb_plus);
    if (arm.nb_minus >= 0) cols.push_back(arm.nb_minus);
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
}

Csr symbolic_pattern(const Grid4& grid) {
  const int n = grid.unknown_count();
  Csr A;
  A.n = n;
  A.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::int32_t> cols;
  for (int r = 0; r < n; ++r) {
    collect_columns(grid, r, cols);
    A.row_ptr[static_cast<std::size_t>(r) + 1] =
        A.row_ptr[static_cast<std::size_t>(r)] + static_cast<std::int32_t>(cols.size());
    A.cols.insert(A.cols.end(), cols.begin(), cols.end());
  }
  A.vals.assign(A.cols.size(), 0.0);
  return A;
}

inline void add_at(Csr& A, int r, std::int32_t c, double v) {
  const std::int32_t b = A.row_ptr[static_cast<std::size_t>(r)];
  const std::int32_t e = A.row_ptr[static_cast<std::size_t>(r) + 1];
  const auto first = A.cols.begin() + b;
  const auto last = A.cols.begin() + e;
  const auto it = std::lower_bound(first, last, c);
  A.vals[static_cast<std::size_t>(it - A.cols.begin())] += v;
}

// Adds coeff * d(second_diff)/du to row r of A.
void add_second_diff(Csr& A, int r, const StencilArm& arm, double step, double coeff) {
  const double a = arm.frac_plus * step;
  const double b = arm.frac_minus * step;
  if (arm.nb_plus >= 0) add_at(A, r, arm.nb_plus, coeff * 2.0 / (a * (a + b)));
  if (arm.nb_minus >= 0) add_at(A, r, arm.nb_minus, coeff * 2.0 / (b * (a + b)));
  add_at(A, r, r, -coeff * 2.0 / (a * b));
}

// Jacobian of the discrete operator at the current iterate.
void assemble_jacobian(const Grid4& grid, std::span<const double> u, Csr& A) {
  std::fill(A.vals.begin(), A.vals.end(), 0.0);
  const double hs = grid.h;
  const double hd = grid.h * std::numbers::sqrt2;
  for (int r = 0; r < grid.unknown_count(); ++r) {
    const NodeOperators ops = node_operators(grid, u, r);
    const auto& ax = grid.axis[static_cast<std::size_t>(r)];
    const auto& dg = grid.diag[static_cast<std::size_t>(r)];

    add_second_diff(A, r, ax[0], hs, ops.Q);
    add_second_diff(A, r, ax[2], hs, ops.Q);
    add_second_diff(A, r, ax[1], hs, ops.P);
    add_second_diff(A, r, ax[3], hs, ops.P);

    // mixed terms; each plane derivative is half the difference of the two
    // diagonal second differences
    const double cR = -2.0 * ops.R;
    const double cS_14 = -2.0 * ops.S;
    const double cS_23 = 2.0 * ops.S;
    add_second_diff(A, r, dg[0], hd, 0.5 * cR);
    add_second_diff(A, r, dg[1], hd, -0.5 * cR);
    add_second_diff(A, r, dg[2], hd, 0.5 * cR);
    add_second_diff(A, r, dg[3], hd, -0.5 * cR);
    add_second_diff(A, r, dg[4], hd, 0.5 * cS_14);
    add_second_diff(A, r, dg[5], hd, -0.5 * cS_14);
    add_second_diff(A, r, dg[6], hd, 0.5 * cS_23);
    add_second_diff(A, r, dg[7], hd, -0.5 * cS_23);
  }
}

void assemble_laplacian(const Grid4& grid, Csr& A) {
  std::fill(A.vals.begin(), A.vals.end(), 0.0);
  const double hs = grid.h;
  for (int r = 0; r < grid.unknown_count(); ++r) {
    for (int k = 0; k < 4; ++k) {
      add_second_diff(A, r, grid.axis[static_cast<std::size_t>(r)][k], hs, 1.0);
    }
  }
}

int count_psh_violations(const Grid4& grid, std::span<const double> u) {
  int bad = 0;
  for (int r = 0; r < grid.unknown_count(); ++r) {
    const NodeOperators ops = node_operators(grid, u, r);
    if (!(ops.P > 0.0) || !(ops.det() > 0.0)) ++bad;
  }
  return bad;
}

void residual_vec(const Grid4& grid, std::span<const double> u, double psi,
                  std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(grid.unknown_count()));
  for (int r = 0; r < grid.unknown_count(); ++r) {
    out[static_cast<std::size_t>(r)] = node_operators(grid, u, r).det() - 16.0 * psi;
  }
}

} // namespace

LinearSolveStats bicgstab(const Csr& A, std::span<const double> b, std::span<double> x,
                          double rel_tol, int max_iter) {
  const int n = A.n;
  std::vector<double> diag(static_cast<std::size_t>(n), 1.0);
  for (int r = 0; r < n; ++r) {
    for (std::int32_t k = A.row_ptr[static_cast<std::size_t>(r)];
         k < A.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      if (A.cols[static_cast<std::size_t>(k)] == r) {
        const double d = A.vals[static_cast<std::size_t>(k)];
        diag[static_cast<std::size_t>(r)] = (std::fabs(d) > 1e-300) ? d : 1.0;
      }
    }
  }
  auto precond = [&](std::vector<double>& z, const std::vector<double>& r) {
    z.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag[i];
  };

  const double bnorm = std::sqrt(std::max(kernels::dot(b, b), 1e-300));
  std::vector<double> r(static_cast<std::size_t>(n)), rhat, p, v, s, t, phat, shat, tmp;
  kernels::spmv_csr(A.row_ptr, A.cols, A.vals, x, r);
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = b[i] - r[static_cast<std::size_t>(i)];

  LinearSolveStats stats;
  int restarts = 0;

restart:
  rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  p.assign(static_cast<std::size_t>(n), 0.0);
  v.assign(static_cast<std::size_t>(n), 0.0);

  for (; stats.iterations < max_iter; ++stats.iterations) {
    const double rnorm = std::sqrt(kernels::dot(r, r));
    stats.rel_residual = rnorm / bnorm;
    if (stats.rel_residual <= rel_tol) {
      stats.converged = true;
      return stats;
    }
    const double rho1 = kernels::dot(rhat, r);
    if (std::fabs(rho1) < 1e-300) {
      if (++restarts > 5) return stats;
      goto restart;
    }
    const double beta = (rho1 / rho) * (alpha / omega);
    // p = r + beta (p - omega v)
    kernels::axpy(p, -omega, v);
    tmp = r;
    kernels::axpy(tmp, beta, p);
    p.swap(tmp);

    precond(phat, p);
    kernels::spmv_csr(A.row_ptr, A.cols, A.vals, phat, v);
    const double rv = kernels::dot(rhat, v);
    if (std::fabs(rv) < 1e-300) {
      if (++restarts > 5) return stats;
      goto restart;
    }
    alpha = rho1 / rv;
    s = r;
    kernels::axpy(s, -alpha, v);
    if (std::sqrt(kernels::dot(s, s)) / bnorm <= rel_tol) {
      kernels::axpy(x, alpha, phat);
      stats.rel_residual = std::sqrt(kernels::dot(s, s)) / bnorm;
      stats.converged = true;
      return stats;
    }
    precond(shat, s);
    t.resize(static_cast<std::size_t>(n));
    kernels::spmv_csr(A.row_ptr, A.cols, A.vals, shat, t);
    const double tt = kernels::dot(t, t);
    if (tt < 1e-300) {
      if (++restarts > 5) return stats;
      goto restart;
    }
    omega = kernels::dot(t, s) / tt;
    kernels::axpy(x, alpha, phat);
    kernels::axpy(x, omega, shat);
    r = s;
    kernels::axpy(r, -omega, t);
    rho = rho1;
    if (omega == 0.0) {
      if (++restarts > 5) return stats;
      goto restart;
    }
  }
  return stats;
}

std::pair<GridField, SolveReport> newton_solve(std::shared_ptr<const Grid4> grid,
                                               double psi, const SolverConfig& config) {
  if (!(psi > 0.0)) {
    throw std::invalid_argument("newton_solve: psi must be positive (degenerate equation)");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Grid4& g = *grid;
  const int n = g.unknown_count();
  const double relax = config.heuristic ? 10.0 : 1.0;
  const double tol = config.tol_factor * 16.0 * psi * relax;
  const double lin_tol = config.lin_rel_tol * relax;

  SolveReport rep;
  rep.heuristic = config.heuristic;

  GridField u;
  u.grid = grid;
  u.u.assign(static_cast<std::size_t>(n), 0.0);

  // initial guess: Laplace(u0) = 8 sqrt(psi), u0 = 0 on the boundary
  {
    Csr L = symbolic_pattern(g);
    assemble_laplacian(g, L);
    std::vector<double> b(static_cast<std::size_t>(n), 8.0 * std::sqrt(psi));
    const auto st = bicgstab(L, b, u.u, lin_tol, config.lin_max_iter);
    rep.linear_iterations += st.iterations;
    if (!st.converged) {
      rep.status = "damping_floor";
      rep.final_residual = st.rel_residual;
      return {u, rep};
    }
  }

  // keep the start point inside the ellipticity cone
  {
    Vec4 lo, hi;
    g.body->bounding_box(lo, hi);
    Vec4 c;
    double rad2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      c[k] = 0.5 * (lo[k] + hi[k]);
      rad2 += 0.25 * (hi[k] - lo[k]) * (hi[k] - lo[k]);
    }
    double mu = 1e-4 * std::sqrt(psi);
    for (int lift = 0; lift < 24 && count_psh_violations(g, u.u) > 0; ++lift) {
      for (int k = 0; k < n; ++k) {
        const Vec4 x = g.coords(g.node_of_unknown[k]);
        double q = -rad2;
        for (int d = 0; d < 4; ++d) q += (x[d] - c[d]) * (x[d] - c[d]);
        u.u[static_cast<std::size_t>(k)] += mu * q;
      }
      mu *= 2.0;
    }
  }

  std::vector<double> res;
  residual_vec(g, u.u, psi, res);
  double rnorm = kernels::max_abs(res);
  rep.residual_history.push_back(rnorm);

  Csr J = symbolic_pattern(g);
  std::vector<double> rhs(static_cast<std::size_t>(n));
  std::vector<double> delta(static_cast<std::size_t>(n));
  std::vector<double> trial(static_cast<std::size_t>(n));
  std::vector<double> tres;

  rep.status = "converged";
  while (rnorm > tol) {
    if (rep.iterations >= config.max_newton) {
      rep.status = "damping_floor";
      break;
    }
    assemble_jacobian(g, u.u, J);
    for (int i = 0; i < n; ++i) rhs[static_cast<std::size_t>(i)] = -res[static_cast<std::size_t>(i)];
    std::fill(delta.begin(), delta.end(), 0.0);
    const auto st = bicgstab(J, rhs, delta, lin_tol, config.lin_max_iter);
    rep.linear_iterations += st.iterations;

    double lambda = 1.0;
    bool accepted = false;
    bool psh_blocked = false;
    while (lambda >= std::ldexp(1.0, -20)) {
      kernels::waxpy(trial, u.u, lambda, delta);
      residual_vec(g, trial, psi, tres);
      const double tn = kernels::max_abs(tres);
      const int viol = count_psh_violations(g, trial);
      if (tn < rnorm && viol == 0) {
        u.u = trial;
        res = tres;
        rnorm = tn;
        accepted = true;
        break;
      }
      psh_blocked = (viol > 0);
      lambda *= 0.5;
      ++rep.damping_steps;
    }
    if (!accepted) {
      rep.status = psh_blocked ? "ellipticity_loss" : "damping_floor";
      break;
    }
    ++rep.iterations;
    rep.residual_history.push_back(rnorm);
  }

  rep.psh_violations = count_psh_violations(g, u.u);
  rep.final_residual = rnorm;
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return {u, rep};
}

double exact_ball_solution(const Vec4& x) {
  return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] - 1.0;
}

CertificateReport comparison_check(const GridField& u, double a, double A) {
  const Grid4& g = *u.grid;
  double worst = -std::numeric_limits<double>::infinity();
  double umax = 0.0;
  for (int k = 0; k < g.unknown_count(); ++k) {
    const Vec4 x = g.coords(g.node_of_unknown[k]);
    const double w = 0.5 * A * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] -
                                a * a * x[3] * x[3]);
    const double uval = u.u[static_cast<std::size_t>(k)];
    worst = std::max(worst, w - uval);
    umax = std::max(umax, std::fabs(uval));
  }
  CertificateReport rep;
  rep.subject = "comparison_check";
  const double scale = std::max(umax, 1e-300);
  rep.add("subsolution_violation", std::max(worst, 0.0) / scale, 1e-3);
  return rep;
}

namespace {

const double kProbeT[5] = {0.5, 0.4, 0.3, 0.2, 0.1};

} // namespace

double decay_probe(const GridField& u, const Vec4& z, double alpha) {
  (void)alpha;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (double t : kProbeT) {
    const Vec4 p = {t * z[0], t * z[1], t * z[2], t * z[3]};
    const double val = std::fabs(interpolate_at(u, p));
    if (val <= 0.0) {
      throw std::domain_error("decay_probe: field vanishes on the sample segment");
    }
    const double lx = std::log(t);
    const double ly = std::log(val);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = 5.0;
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<double> decay_samples(const GridField& u, const Vec4& z, double alpha) {
  std::vector<double> out;
  for (double t : kProbeT) {
    const Vec4 p = {t * z[0], t * z[1], t * z[2], t * z[3]};
    out.push_back(std::pow(t, -1.0 / alpha) * std::fabs(interpolate_at(u, p)));
  }
  return out;
}

} // namespace cma::solver
