#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cma/solver.hpp"

using namespace cma;
using namespace cma::solver;

namespace {

double sq(double x) { return x * x; }

double quadratic_u(const Vec4& c, const Vec4& x) {
  return c[0] * x[0] * x[0] + c[1] * x[1] * x[1] + c[2] * x[2] * x[2] +
         c[3] * x[3] * x[3] - 1.0;
}

} // namespace

TEST_CASE("discretize the unit ball at h = 1/6") {
  const auto ball = bodies::ConvexBody::make_ball({0, 0, 0, 0}, 1.0);
  const double h = 1.0 / 6.0;
  const auto grid = discretize(ball, h);

  // origin is an interior node
  bool found_origin = false;
  for (int k = 0; k < grid->unknown_count(); ++k) {
    const Vec4 x = grid->coords(grid->node_of_unknown[k]);
    if (std::fabs(x[0]) + std::fabs(x[1]) + std::fabs(x[2]) + std::fabs(x[3]) < 1e-12) {
      found_origin = grid->node_class(grid->node_of_unknown[k]) == NodeClass::interior;
    }
  }
  CHECK(found_origin);

  // classification matches direct membership
  std::int64_t inside = 0;
  for (std::int64_t node = 0; node < grid->node_count(); ++node) {
    const Vec4 x = grid->coords(node);
    const double r2 = sq(x[0]) + sq(x[1]) + sq(x[2]) + sq(x[3]);
    const bool in = r2 < 1.0;
    const NodeClass c = grid->node_class(node);
    if (in) {
      CHECK(c != NodeClass::exterior);
      ++inside;
    } else {
      CHECK(c == NodeClass::exterior);
    }
  }

  // volume heuristic: node count tracks |B|/h^4 = (pi^2/2)/h^4
  const double expect = (std::numbers::pi * std::numbers::pi / 2.0) / (h * h * h * h);
  CHECK(std::fabs(static_cast<double>(inside) - expect) <= 0.10 * expect);

  // every stencil fraction lies in (0, 1]
  for (int k = 0; k < grid->unknown_count(); ++k) {
    for (const auto& arm : grid->axis[static_cast<std::size_t>(k)]) {
      CHECK(arm.frac_plus > 0.0);
      CHECK(arm.frac_plus <= 1.0);
      CHECK(arm.frac_minus > 0.0);
      CHECK(arm.frac_minus <= 1.0);
    }
    for (const auto& arm : grid->diag[static_cast<std::size_t>(k)]) {
      CHECK(arm.frac_plus > 0.0);
      CHECK(arm.frac_plus <= 1.0);
    }
  }

  // interior nodes see only interior or cut axis neighbors
  const std::int64_t stride[4] = {1, grid->dims[0],
                                  static_cast<std::int64_t>(grid->dims[0]) * grid->dims[1],
                                  static_cast<std::int64_t>(grid->dims[0]) * grid->dims[1] *
                                      grid->dims[2]};
  for (std::int64_t node = 0; node < grid->node_count(); ++node) {
    if (grid->node_class(node) != NodeClass::interior) continue;
    for (int k = 0; k < 4; ++k) {
      for (int sgn : {1, -1}) {
        const NodeClass nc = grid->node_class(node + sgn * stride[k]);
        CHECK((nc == NodeClass::interior || nc == NodeClass::cut));
      }
    }
  }
}

TEST_CASE("too-coarse grids raise the resolution error") {
  const auto tiny = bodies::ConvexBody::make_ball({0, 0, 0, 0}, 0.05);
  CHECK_THROWS_AS(discretize(tiny, 0.5), ResolutionError);
}

TEST_CASE("ma_residual_field examples") {
  const auto ball = bodies::ConvexBody::make_ball({0, 0, 0, 0}, 1.0);
  const auto grid = discretize(ball, 1.0 / 6.0);

  {
    GridField zero;
    zero.grid = grid;
    zero.u.assign(grid->unknown_count(), 0.0);
    const auto res = ma_residual_field(*grid, zero, 1.0);
    for (double r : res.u) CHECK(r == doctest::Approx(-16.0));
  }
  {
    // exact ball solution: every stencil is exact on quadratics
    const auto u = sample_field(grid, exact_ball_solution);
    const auto res = ma_residual_field(*grid, u, 1.0);
    double worst = 0.0;
    for (double r : res.u) worst = std::max(worst, std::fabs(r));
    CHECK(worst <= 1e-9);
  }
  {
    // general quadratic ansatz with (c1+c3)(c2+c4) = 4
    const Vec4 c = {1.5, 1.0, 0.5, 1.0};
    const auto ell = bodies::ConvexBody::make_ellipsoid(
        {0, 0, 0, 0}, {1.0 / std::sqrt(1.5), 1.0, 1.0 / std::sqrt(0.5), 1.0});
    const auto egrid = discretize(ell, 1.0 / 6.0);
    const auto u = sample_field(egrid, [&](const Vec4& x) { return quadratic_u(c, x); });
    const auto res = ma_residual_field(*egrid, u, 1.0);
    double worst = 0.0;
    for (double r : res.u) worst = std::max(worst, std::fabs(r));
    CHECK(worst <= 1e-10 * 16.0);
  }
}

TEST_CASE("bicgstab solves a shifted Laplacian") {
  // small SPD-ish banded system
  const int n = 200;
  Csr A;
  A.n = n;
  A.row_ptr.push_back(0);
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      A.cols.push_back(i - 1);
      A.vals.push_back(-1.0);
    }
    A.cols.push_back(i);
    A.vals.push_back(2.5);
    if (i + 1 < n) {
      A.cols.push_back(i + 1);
      A.vals.push_back(-1.0);
    }
    A.row_ptr.push_back(static_cast<std::int32_t>(A.cols.size()));
  }
  std::vector<double> b(n, 1.0), x(n, 0.0);
  const auto st = bicgstab(A, b, x, 1e-12, 1000);
  CHECK(st.converged);
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (std::int32_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
      s += A.vals[k] * x[A.cols[k]];
    r[i] = s - b[i];
  }
  double worst = 0;
  for (double v : r) worst = std::max(worst, std::fabs(v));
  CHECK(worst <= 1e-10);
}

TEST_CASE("newton solve on the unit ball") {
  const auto ball = bodies::ConvexBody::make_ball({0, 0, 0, 0}, 1.0);
  const auto grid = discretize(ball, 1.0 / 6.0);

  CHECK_THROWS_AS(newton_solve(grid, 0.0, SolverConfig{}), std::invalid_argument);

  auto [u, rep] = newton_solve(grid, 1.0, SolverConfig{});
  REQUIRE(rep.converged());
  CHECK(rep.iterations <= 10);
  CHECK(rep.psh_violations == 0);

  // residual history strictly decreasing after each accepted step
  for (std::size_t i = 1; i < rep.residual_history.size(); ++i) {
    CHECK(rep.residual_history[i] < rep.residual_history[i - 1]);
  }

  double worst = 0.0;
  for (int k = 0; k < grid->unknown_count(); ++k) {
    const Vec4 x = grid->coords(grid->node_of_unknown[k]);
    worst = std::max(worst, std::fabs(u.u[static_cast<std::size_t>(k)] -
                                      exact_ball_solution(x)));
    CHECK(u.u[static_cast<std::size_t>(k)] <= 1e-9);  // computed field stays <= 0
  }
  MESSAGE("ball Linf error at h=1/6: ", worst);
  CHECK(worst <= 1e-5);

  // discrete comparison: u >= exact - C h^2 (here: tiny)
  for (int k = 0; k < grid->unknown_count(); ++k) {
    const Vec4 x = grid->coords(grid->node_of_unknown[k]);
    CHECK(u.u[static_cast<std::size_t>(k)] >= exact_ball_solution(x) - 1e-5);
  }
}

TEST_CASE("newton recovers the ellipsoid quadratic to stencil accuracy") {
  const Vec4 c = {1.5, 1.0, 0.5, 1.0};
  const auto ell = bodies::ConvexBody::make_ellipsoid(
      {0, 0, 0, 0}, {1.0 / std::sqrt(c[0]), 1.0, 1.0 / std::sqrt(c[2]), 1.0});
  const auto grid = discretize(ell, 1.0 / 6.0);
  auto [u, rep] = newton_solve(grid, 1.0, SolverConfig{});
  REQUIRE(rep.converged());
  double worst = 0.0;
  for (int k = 0; k < grid->unknown_count(); ++k) {
    const Vec4 x = grid->coords(grid->node_of_unknown[k]);
    worst = std::max(worst, std::fabs(u.u[static_cast<std::size_t>(k)] -
                                      quadratic_u(c, x)));
  }
  MESSAGE("ellipsoid Linf error at h=1/6: ", worst);
  CHECK(worst <= 1e-5);
}

TEST_CASE("solver symmetry on the unit ball") {
  const auto ball = bodies::ConvexBody::make_ball({0, 0, 0, 0}, 1.0);
  const auto grid = discretize(ball, 1.0 / 6.0);
  auto [u, rep] = newton_solve(grid, 1.0, SolverConfig{});
  REQUIRE(rep.converged());
  // sign flips and the (1,3)(2,4)-pair coordinate swap leave the field
  // unchanged to solver tolerance
  auto value_at = [&](const Vec4& x) {
    const auto m = grid->node_multi(0);
    (void)m;
    int idx[4];
    for (int k = 0; k < 4; ++k) {
      const double s = (x[k] - grid->origin[k]) / grid->h;
      idx[k] = static_cast<int>(std::llround(s));
    }
    return u.at_node(grid->node_index(idx[0], idx[1], idx[2], idx[3]));
  };
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, grid->unknown_count() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec4 x = grid->coords(grid->node_of_unknown[pick(rng)]);
    const Vec4 flip = {-x[0], x[1], -x[2], x[3]};
    const Vec4 swap = {x[2], x[3], x[0], x[1]};  // (x1,y1) <-> pairs preserved
    CHECK(std::fabs(value_at(x) - value_at(flip)) <= 1e-7);
    CHECK(std::fabs(value_at(x) - value_at(swap)) <= 1e-7);
  }
}

TEST_CASE("two identical solves produce bit-identical fields and reports") {
  const auto ball = bodies::ConvexBody::make_ball({0, 0, 0, 0}, 1.0);
  const auto grid = discretize(ball, 1.0 / 5.0);
  auto [u1, r1] = newton_solve(grid, 1.0, SolverConfig{});
  auto [u2, r2] = newton_solve(grid, 1.0, SolverConfig{});
  REQUIRE(u1.u.size() == u2.u.size());
  for (std::size_t i = 0; i < u1.u.size(); ++i) CHECK(u1.u[i] == u2.u[i]);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.residual_history == r2.residual_history);
}

TEST_CASE("comparison check and decay probe on the closed-form subsolution") {
  const double a = 0.5;
  const double A = 1.0 / std::sqrt(2.0 * (1.0 - a * a));
  const auto cone = bodies::cone_hull_body(a, 1.0, 0.4);
  const auto grid = discretize(cone, 1.0 / 10.0);

  auto w_fn = [&](const Vec4& x) {
    return 0.5 * A * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - a * a * x[3] * x[3]);
  };
  const auto w = sample_field(grid, w_fn);

  // w satisfies the RHS-1 equation: (w11+w33)(w22+w44) - ... = 1. The
  // discrete check only holds at nodes whose stencils never touch the
  // boundary (w does not vanish on the hull boundary, so boundary-cut arms
  // would impose the wrong Dirichlet data for it).
  const auto res = ma_residual_field(*grid, w, 1.0 / 16.0);
  double worst = 0.0;
  for (int k = 0; k < grid->unknown_count(); ++k) {
    bool full = true;
    for (const auto& arm : grid->axis[static_cast<std::size_t>(k)]) {
      if (arm.nb_plus < 0 || arm.nb_minus < 0) full = false;
    }
    for (const auto& arm : grid->diag[static_cast<std::size_t>(k)]) {
      if (arm.nb_plus < 0 || arm.nb_minus < 0) full = false;
    }
    if (full) worst = std::max(worst, std::fabs(res.u[static_cast<std::size_t>(k)]));
  }
  CHECK(worst <= 1e-9);

  // w compared against itself has no violation
  const auto rep = comparison_check(w, a, A);
  CHECK(rep.passed);

  // w(tz) = -A a^2 t^2 / 2 along the axis: exponent exactly 2
  const double p = decay_probe(w, {0, 0, 0, 1}, 0.6);
  CHECK(p == doctest::Approx(2.0).epsilon(1e-6));

  // w on the cone boundary rho = a x4 vanishes
  CHECK(w_fn({0.3, 0, 0, 0.6}) == doctest::Approx(0.0));
}
