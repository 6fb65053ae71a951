#include "cma/grid.hpp"

#include <cmath>

namespace cma::solver {

namespace {

// Cut fractions below the floor snap the node onto the boundary (value 0).
// The floor guards stencil conditioning near corner slivers; it is kept small
// because every snap displaces the boundary by frac*h and costs
// O(frac*h*|grad u|) accuracy at the neighbors.
constexpr double kSnapFloor = 1e-3;

struct AxisNeighbors {
  std::int64_t plus, minus;
};

} // namespace

std::shared_ptr<const Grid4> discretize(const bodies::ConvexBody& body, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("discretize: h must be positive");

  auto grid = std::make_shared<Grid4>();
  grid->h = h;
  grid->body = std::make_shared<bodies::ConvexBody>(body);

  Vec4 lo, hi;
  body.bounding_box(lo, hi);
  for (int k = 0; k < 4; ++k) {
    const long lo_idx = static_cast<long>(std::floor(lo[k] / h + 1e-9)) - 1;
    const long hi_idx = static_cast<long>(std::ceil(hi[k] / h - 1e-9)) + 1;
    grid->origin[k] = h * static_cast<double>(lo_idx);
    grid->dims[k] = static_cast<int>(hi_idx - lo_idx) + 1;
  }

  const std::int64_t nn = grid->node_count();
  grid->cls.assign(static_cast<std::size_t>(nn), 0);

  // inside / outside by the membership margin
  std::int64_t inside_count = 0;
  for (std::int64_t node = 0; node < nn; ++node) {
    if (body.membership(grid->coords(node)) > 0.0) {
      grid->cls[static_cast<std::size_t>(node)] = static_cast<std::uint8_t>(NodeClass::interior);
      ++inside_count;
    }
  }
  if (inside_count == 0) {
    throw ResolutionError("discretize: grid too coarse, no node lies inside the body");
  }

  const std::int64_t stride[4] = {1, grid->dims[0],
                                  static_cast<std::int64_t>(grid->dims[0]) * grid->dims[1],
                                  static_cast<std::int64_t>(grid->dims[0]) * grid->dims[1] *
                                      grid->dims[2]};

  auto inside = [&](std::int64_t node) {
    return grid->cls[static_cast<std::size_t>(node)] != 0;
  };

  // mark cut nodes (an axis neighbor falls outside)
  for (std::int64_t node = 0; node < nn; ++node) {
    if (!inside(node)) continue;
    const auto m = grid->node_multi(node);
    bool cut = false;
    for (int k = 0; k < 4 && !cut; ++k) {
      if (m[k] + 1 >= grid->dims[k] || m[k] - 1 < 0) {
        throw ResolutionError("discretize: inside node touches the grid edge");
      }
      if (!inside(node + stride[k]) || !inside(node - stride[k])) cut = true;
    }
    if (cut) grid->cls[static_cast<std::size_t>(node)] = static_cast<std::uint8_t>(NodeClass::cut);
  }

  // Any stencil direction (axis or plane diagonal) whose crossing fraction
  // falls below the floor snaps the node onto the boundary (Dirichlet 0);
  // boundary facets can hug a node along a diagonal even when both axis
  // fractions are comfortable.
  static const int snap_pair_a[4] = {0, 2, 0, 1};
  static const int snap_pair_b[4] = {1, 3, 3, 2};
  for (std::int64_t node = 0; node < nn; ++node) {
    if (!inside(node)) continue;
    const Vec4 x = grid->coords(node);
    bool snap = false;
    for (int k = 0; k < 4 && !snap; ++k) {
      for (int sgn : {+1, -1}) {
        const std::int64_t nb = node + sgn * stride[k];
        if (inside(nb)) continue;
        Vec4 dir{};
        dir[k] = sgn * h;
        if (body.boundary_crossing(x, dir, 1.0) < kSnapFloor) {
          snap = true;
          break;
        }
      }
    }
    for (int p = 0; p < 4 && !snap; ++p) {
      const int a = snap_pair_a[p];
      const int b = snap_pair_b[p];
      for (int sb : {+1, -1}) {
        for (int sgn : {+1, -1}) {
          const std::int64_t nb = node + sgn * (stride[a] + sb * stride[b]);
          if (inside(nb)) continue;
          Vec4 dir{};
          dir[a] = sgn * h;
          dir[b] = sgn * sb * h;
          if (body.boundary_crossing(x, dir, 1.0) < kSnapFloor) {
            snap = true;
            break;
          }
        }
        if (snap) break;
      }
    }
    if (snap) grid->cls[static_cast<std::size_t>(node)] = static_cast<std::uint8_t>(NodeClass::snapped);
  }

  // re-derive interior/cut with snapped nodes acting as boundary
  for (std::int64_t node = 0; node < nn; ++node) {
    const NodeClass c = grid->node_class(node);
    if (c != NodeClass::interior && c != NodeClass::cut) continue;
    bool cut = false;
    for (int k = 0; k < 4 && !cut; ++k) {
      for (int sgn : {+1, -1}) {
        const NodeClass nc = grid->node_class(node + sgn * stride[k]);
        if (nc == NodeClass::exterior || nc == NodeClass::snapped) {
          cut = true;
          break;
        }
      }
    }
    grid->cls[static_cast<std::size_t>(node)] =
        static_cast<std::uint8_t>(cut ? NodeClass::cut : NodeClass::interior);
  }

  bool has_interior = false;
  for (std::int64_t node = 0; node < nn && !has_interior; ++node) {
    if (grid->node_class(node) == NodeClass::interior) has_interior = true;
  }
  if (!has_interior) {
    throw ResolutionError("discretize: grid too coarse, no interior node");
  }

  // unknown numbering in node order
  grid->unknown_of_node.assign(static_cast<std::size_t>(nn), -1);
  for (std::int64_t node = 0; node < nn; ++node) {
    if (grid->value_carrying(node)) {
      grid->unknown_of_node[static_cast<std::size_t>(node)] =
          static_cast<std::int32_t>(grid->node_of_unknown.size());
      grid->node_of_unknown.push_back(static_cast<std::int32_t>(node));
    }
  }

  const int nu = grid->unknown_count();
  grid->axis.resize(static_cast<std::size_t>(nu));
  grid->diag.resize(static_cast<std::size_t>(nu));

  auto arm_toward = [&](std::int64_t node, const Vec4& x, const Vec4& step_vec,
                        std::int64_t nb_node, double& frac, std::int32_t& nb) {
    const NodeClass nc = grid->node_class(nb_node);
    if (nc == NodeClass::interior || nc == NodeClass::cut) {
      frac = 1.0;
      nb = grid->unknown_of_node[static_cast<std::size_t>(nb_node)];
    } else if (nc == NodeClass::snapped) {
      frac = 1.0;
      nb = -1;
    } else {
      frac = std::max(body.boundary_crossing(x, step_vec, 1.0), 1e-6);
      nb = -1;
    }
    (void)node;
  };

  static const int pair_a[4] = {0, 2, 0, 1};
  static const int pair_b[4] = {1, 3, 3, 2};

  for (int uidx = 0; uidx < nu; ++uidx) {
    const std::int64_t node = grid->node_of_unknown[uidx];
    const Vec4 x = grid->coords(node);

    for (int k = 0; k < 4; ++k) {
      StencilArm& arm = grid->axis[static_cast<std::size_t>(uidx)][k];
      Vec4 sp{};
      sp[k] = h;
      arm_toward(node, x, sp, node + stride[k], arm.frac_plus, arm.nb_plus);
      Vec4 sm{};
      sm[k] = -h;
      arm_toward(node, x, sm, node - stride[k], arm.frac_minus, arm.nb_minus);
    }

    for (int p = 0; p < 4; ++p) {
      const int a = pair_a[p];
      const int b = pair_b[p];
      for (int d = 0; d < 2; ++d) {
        const int sb = (d == 0) ? +1 : -1;  // e_a + e_b, then e_a - e_b
        StencilArm& arm = grid->diag[static_cast<std::size_t>(uidx)][2 * p + d];
        Vec4 sp{};
        sp[a] = h;
        sp[b] = sb * h;
        arm_toward(node, x, sp, node + stride[a] + sb * stride[b], arm.frac_plus,
                   arm.nb_plus);
        Vec4 sm{};
        sm[a] = -h;
        sm[b] = -sb * h;
        arm_toward(node, x, sm, node - stride[a] - sb * stride[b], arm.frac_minus,
                   arm.nb_minus);
      }
    }
  }

  return grid;
}

namespace {

// 3-point unequal-arm second difference along one direction with the
// Dirichlet value 0 at fractional crossings. step is the full arm length.
inline double second_diff(const StencilArm& arm, std::span<const double> u, double u0,
                          double step) {
  const double a = arm.frac_plus * step;
  const double b = arm.frac_minus * step;
  const double up = arm.nb_plus >= 0 ? u[static_cast<std::size_t>(arm.nb_plus)] : 0.0;
  const double um = arm.nb_minus >= 0 ? u[static_cast<std::size_t>(arm.nb_minus)] : 0.0;
  return 2.0 * (up / (a * (a + b)) + um / (b * (a + b)) - u0 / (a * b));
}

} // namespace

NodeOperators node_operators(const Grid4& grid, std::span<const double> u, int unknown) {
  const double u0 = u[static_cast<std::size_t>(unknown)];
  const auto& ax = grid.axis[static_cast<std::size_t>(unknown)];
  const auto& dg = grid.diag[static_cast<std::size_t>(unknown)];
  const double hs = grid.h;
  const double hd = grid.h * std::numbers::sqrt2;

  const double d11 = second_diff(ax[0], u, u0, hs);
  const double d22 = second_diff(ax[1], u, u0, hs);
  const double d33 = second_diff(ax[2], u, u0, hs);
  const double d44 = second_diff(ax[3], u, u0, hs);

  auto mixed = [&](int p) {
    const double dp = second_diff(dg[2 * p + 0], u, u0, hd);
    const double dm = second_diff(dg[2 * p + 1], u, u0, hd);
    return 0.5 * (dp - dm);
  };

  NodeOperators ops;
  ops.P = d11 + d33;
  ops.Q = d22 + d44;
  ops.R = mixed(0) + mixed(1);   // u12 + u34
  ops.S = mixed(2) - mixed(3);   // u14 - u23
  return ops;
}

GridField ma_residual_field(const Grid4& grid, const GridField& u, double psi) {
  GridField res;
  res.grid = u.grid;
  res.u.resize(static_cast<std::size_t>(grid.unknown_count()));
  for (int k = 0; k < grid.unknown_count(); ++k) {
    const NodeOperators ops = node_operators(grid, u.u, k);
    res.u[static_cast<std::size_t>(k)] = ops.det() - 16.0 * psi;
  }
  return res;
}

double interpolate_at(const GridField& f, const Vec4& x) {
  const Grid4& g = *f.grid;
  int base[4];
  double t[4];
  for (int k = 0; k < 4; ++k) {
    const double s = (x[k] - g.origin[k]) / g.h;
    base[k] = static_cast<int>(std::floor(s));
    t[k] = s - base[k];
    if (base[k] < 0 || base[k] + 1 >= g.dims[k]) {
      throw std::domain_error("interpolate_at: point outside grid support");
    }
  }
  double value = 0.0;
  double outside_weight = 0.0;
  for (int corner = 0; corner < 16; ++corner) {
    double w = 1.0;
    int idx[4];
    for (int k = 0; k < 4; ++k) {
      const int bit = (corner >> k) & 1;
      idx[k] = base[k] + bit;
      w *= bit ? t[k] : (1.0 - t[k]);
    }
    if (w < 1e-14) continue;
    const std::int64_t node = g.node_index(idx[0], idx[1], idx[2], idx[3]);
    const NodeClass c = g.node_class(node);
    if (c == NodeClass::exterior) {
      // boundary extension by 0 tolerates slivers; a dominant exterior
      // corner means the point is effectively unsupported
      outside_weight += w;
      continue;
    }
    value += w * f.at_node(node);
  }
  if (outside_weight > 0.3) {
    throw std::domain_error("interpolate_at: point outside grid support");
  }
  return value;
}

} // namespace cma::solver
