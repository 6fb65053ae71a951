#include "cma/audit.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cma::audit {

GridField v_field(const GridField& u) {
  const Grid4& g = *u.grid;
  GridField v;
  v.grid = u.grid;
  v.u.resize(u.u.size());
  for (int k = 0; k < g.unknown_count(); ++k) {
    const double uk = u.u[static_cast<std::size_t>(k)];
    const std::int64_t node = g.node_of_unknown[k];
    if (uk >= 0.0) {
      if (g.node_class(node) == solver::NodeClass::interior) {
        throw std::domain_error("v_field: u >= 0 at interior node " + std::to_string(node));
      }
      v.u[static_cast<std::size_t>(k)] = 0.0;
    } else {
      v.u[static_cast<std::size_t>(k)] = -std::sqrt(-uk / 2.0);
    }
  }
  return v;
}

bool node_audited(const Grid4& g, std::int64_t node) {
  if (g.node_class(node) != solver::NodeClass::interior) return false;
  const auto m = g.node_multi(node);
  for (int k = 0; k < 4; ++k) {
    if (m[k] < 2 || m[k] + 2 >= g.dims[k]) return false;
  }
  for (int d3 = -2; d3 <= 2; ++d3)
    for (int d2 = -2; d2 <= 2; ++d2)
      for (int d1 = -2; d1 <= 2; ++d1)
        for (int d0 = -2; d0 <= 2; ++d0) {
          const std::int64_t nb = g.node_index(m[0] + d0, m[1] + d1, m[2] + d2, m[3] + d3);
          if (g.node_class(nb) != solver::NodeClass::interior) return false;
        }
  return true;
}

namespace {

// Central first and second differences of u on the uniform neighborhood of
// an audited node.
struct UDerivs {
  double u0;
  Vec4 grad;
  SymmetricMatrix hess{4};
};

UDerivs u_derivatives(const GridField& f, std::int64_t node) {
  const Grid4& g = *f.grid;
  const auto m = g.node_multi(node);
  const double h = g.h;

  auto at = [&](int d0, int d1, int d2, int d3) {
    return f.at_node(g.node_index(m[0] + d0, m[1] + d1, m[2] + d2, m[3] + d3));
  };

  UDerivs d;
  d.u0 = at(0, 0, 0, 0);
  const int off[4][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  for (int k = 0; k < 4; ++k) {
    const auto& e = off[k];
    d.grad[k] = (at(e[0], e[1], e[2], e[3]) - at(-e[0], -e[1], -e[2], -e[3])) / (2.0 * h);
    d.hess.set(k, k, (at(e[0], e[1], e[2], e[3]) - 2.0 * d.u0 +
                      at(-e[0], -e[1], -e[2], -e[3])) / (h * h));
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      int pp[4] = {0, 0, 0, 0}, pm[4] = {0, 0, 0, 0};
      pp[a] = 1; pp[b] = 1;
      pm[a] = 1; pm[b] = -1;
      const double cross = (at(pp[0], pp[1], pp[2], pp[3]) -
                            at(pm[0], pm[1], pm[2], pm[3]) -
                            at(-pm[0], -pm[1], -pm[2], -pm[3]) +
                            at(-pp[0], -pp[1], -pp[2], -pp[3])) /
                           (4.0 * h * h);
      d.hess.set(a, b, cross);
    }
  }
  return d;
}

} // namespace

SymmetricMatrix hessian_v_at(const GridField& u, std::int64_t node) {
  const Grid4& g = *u.grid;
  if (!node_audited(g, node)) {
    throw std::domain_error("hessian_v_at: node outside the audited region");
  }
  const UDerivs d = u_derivatives(u, node);
  if (d.u0 >= 0.0) {
    throw std::domain_error("hessian_v_at: u >= 0 at node " + std::to_string(node));
  }
  const double v = -std::sqrt(-d.u0 / 2.0);
  Vec4 vg;
  for (int i = 0; i < 4; ++i) vg[i] = -d.grad[i] / (4.0 * v);
  SymmetricMatrix H(4);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      H.set(i, j, -(d.hess(i, j) + 4.0 * vg[i] * vg[j]) / (4.0 * v));
  return H;
}

RankMap rank_map(const GridField& u, double rank_tol, const bodies::StripSpec& strip) {
  const Grid4& g = *u.grid;
  RankMap map;
  map.rank_tol = rank_tol;
  map.strip_eps = strip.epsilon;
  map.interior_min_eig = std::numeric_limits<double>::infinity();
  map.strip_min_eig = std::numeric_limits<double>::infinity();
  map.min_rank = 5;
  map.max_rank = -1;

  for (int k = 0; k < g.unknown_count(); ++k) {
    const std::int64_t node = g.node_of_unknown[k];
    if (!node_audited(g, node)) continue;
    const SymmetricMatrix H = hessian_v_at(u, node);
    const std::vector<double> ev = jacobi_eigenvalues(H);

    RankMapEntry e;
    e.node = node;
    e.coords = g.coords(node);
    for (int i = 0; i < 4; ++i) e.eigenvalues[i] = ev[static_cast<std::size_t>(i)];
    const double thr = rank_tol * ev.back();
    e.rank = 0;
    for (double lam : ev)
      if (lam > thr) ++e.rank;
    e.strip = g.body->in_strip(e.coords, strip);

    map.min_rank = std::min(map.min_rank, e.rank);
    map.max_rank = std::max(map.max_rank, e.rank);
    map.interior_min_eig = std::min(map.interior_min_eig, e.eigenvalues[0]);
    if (e.strip) {
      map.strip_min_eig = std::min(map.strip_min_eig, e.eigenvalues[0]);
      ++map.strip_count;
    }
    ++map.audited_count;
    map.entries.push_back(std::move(e));
  }
  map.constant_rank = map.audited_count > 0 && map.min_rank == map.max_rank;
  return map;
}

double strip_audit(const RankMap& map) {
  if (map.strip_count == 0) {
    throw solver::ResolutionError(
        "strip_audit: no audited node falls in the boundary strip (epsilon unresolvable)");
  }
  if (map.strip_count == map.audited_count) {
    throw solver::ResolutionError(
        "strip_audit: the strip covers the whole audited region (epsilon exceeds the "
        "resolvable inradius)");
  }
  return map.strip_min_eig;
}

double alpha_probe(const GridField& u, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha_probe: alpha must lie in (0,1)");
  }
  const Grid4& g = *u.grid;
  double min_eig = std::numeric_limits<double>::infinity();
  for (int k = 0; k < g.unknown_count(); ++k) {
    const std::int64_t node = g.node_of_unknown[k];
    if (!node_audited(g, node)) continue;
    const UDerivs d = u_derivatives(u, node);
    const double mu = -d.u0;  // > 0 at interior nodes
    SymmetricMatrix G(4);
    const double c1 = alpha * std::pow(mu, alpha - 1.0);
    const double c2 = alpha * (1.0 - alpha) * std::pow(mu, alpha - 2.0);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        G.set(i, j, c1 * d.hess(i, j) + c2 * d.grad[i] * d.grad[j]);
    min_eig = std::min(min_eig, jacobi_eigenvalues(G).front());
  }
  return min_eig;
}

std::vector<SweepEntry> deformation_sweep(const bodies::ConvexBody& omega,
                                          std::span<const double> t_values, double h,
                                          double psi, const solver::SolverConfig& config,
                                          double rank_tol) {
  const bodies::ConvexBody b1 = bodies::ConvexBody::make_ball({0, 0, 0, 0}, 1.0);
  std::vector<SweepEntry> out;
  for (double t : t_values) {
    SweepEntry entry;
    entry.t = t;
    try {
      const bodies::ConvexBody body_t = bodies::minkowski_interpolate(b1, omega, t);
      auto grid = solver::discretize(body_t, h);
      auto [u, rep] = solver::newton_solve(grid, psi, config);
      entry.report = rep;
      entry.u = std::move(u);
      entry.solve_ok = rep.converged();
      if (entry.solve_ok) {
        entry.map = rank_map(entry.u, rank_tol, bodies::StripSpec{4.0 * h});
      }
    } catch (const std::exception&) {
      entry.solve_ok = false;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

} // namespace cma::audit
