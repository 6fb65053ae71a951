#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "cma/bodies.hpp"
#include "cma/matrix.hpp"

// Embedded-boundary 4D Cartesian grids over convex bodies. Nodes are
// classified interior / cut / exterior; cut nodes carry boundary fractions
// along every stencil direction (axis and diagonal), found to 1e-10 on the
// membership margin. Boundary data u = 0 is imposed at the fractional
// crossings in the usual unequal-arm second-difference way; mixed derivatives
// come from the pair of plane diagonals, each differenced the same way, which
// keeps every stencil exact on quadratics right up to the boundary.

namespace cma::solver {

struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class NodeClass : std::uint8_t { exterior = 0, interior = 1, cut = 2, snapped = 3 };

/// One second-difference direction: arms toward +dir and -dir as fractions
/// of the full step; nb < 0 means the Dirichlet value 0 at the fractional
/// crossing, otherwise the unknown index of the neighbor node.
struct StencilArm {
  double frac_plus = 1.0;
  double frac_minus = 1.0;
  std::int32_t nb_plus = -1;
  std::int32_t nb_minus = -1;
};

struct Grid4 {
  Vec4 origin{};
  std::array<int, 4> dims{};
  double h = 0.0;
  std::shared_ptr<const bodies::ConvexBody> body;

  std::vector<std::uint8_t> cls;               // NodeClass per node
  std::vector<std::int32_t> unknown_of_node;   // -1 where not value-carrying
  std::vector<std::int32_t> node_of_unknown;

  // per unknown: 4 axis directions, then 4 plane pairs (0,1),(2,3),(0,3),(1,2)
  // with two diagonals each, ordered (e_a + e_b) then (e_a - e_b)
  std::vector<std::array<StencilArm, 4>> axis;
  std::vector<std::array<StencilArm, 8>> diag;

  std::int64_t node_count() const {
    return static_cast<std::int64_t>(dims[0]) * dims[1] * dims[2] * dims[3];
  }
  int unknown_count() const { return static_cast<int>(node_of_unknown.size()); }

  std::int64_t node_index(int i0, int i1, int i2, int i3) const {
    return ((static_cast<std::int64_t>(i3) * dims[2] + i2) * dims[1] + i1) * dims[0] + i0;
  }
  std::array<int, 4> node_multi(std::int64_t node) const {
    std::array<int, 4> m;
    m[0] = static_cast<int>(node % dims[0]);
    node /= dims[0];
    m[1] = static_cast<int>(node % dims[1]);
    node /= dims[1];
    m[2] = static_cast<int>(node % dims[2]);
    m[3] = static_cast<int>(node / dims[2]);
    return m;
  }
  Vec4 coords(std::int64_t node) const {
    const auto m = node_multi(node);
    return {origin[0] + h * m[0], origin[1] + h * m[1], origin[2] + h * m[2],
            origin[3] + h * m[3]};
  }
  NodeClass node_class(std::int64_t node) const {
    return static_cast<NodeClass>(cls[static_cast<std::size_t>(node)]);
  }
  bool value_carrying(std::int64_t node) const {
    const NodeClass c = node_class(node);
    return c == NodeClass::interior || c == NodeClass::cut;
  }
};

/// Uniform grid over the body's bounding box padded by h; throws
/// ResolutionError when no interior node survives classification.
/// Cut-node fractions below 0.05 snap the node onto the boundary.
std::shared_ptr<const Grid4> discretize(const bodies::ConvexBody& body, double h);

struct GridField {
  std::shared_ptr<const Grid4> grid;
  std::vector<double> u;  // indexed by unknown

  double at_node(std::int64_t node) const {
    const std::int32_t k = grid->unknown_of_node[static_cast<std::size_t>(node)];
    return k >= 0 ? u[static_cast<std::size_t>(k)] : 0.0;
  }
};

/// Samples a closed-form function at every value-carrying node.
template <typename F>
GridField sample_field(const std::shared_ptr<const Grid4>& grid, F&& fn) {
  GridField f;
  f.grid = grid;
  f.u.resize(grid->unknown_count());
  for (int k = 0; k < grid->unknown_count(); ++k) {
    f.u[static_cast<std::size_t>(k)] = fn(grid->coords(grid->node_of_unknown[k]));
  }
  return f;
}

/// The four second-order combinations entering the operator at one node:
/// P = u11+u33, Q = u22+u44, R = u12+u34, S = u14-u23.
struct NodeOperators {
  double P, Q, R, S;
  double det() const { return P * Q - R * R - S * S; }
};

NodeOperators node_operators(const Grid4& grid, std::span<const double> u, int unknown);

/// Discrete residual of the u-form equation: P*Q - R^2 - S^2 - 16*psi at
/// every value-carrying node.
GridField ma_residual_field(const Grid4& grid, const GridField& u, double psi);

/// Multilinear interpolation of a field; exterior corners beyond a small
/// weight budget raise std::domain_error (point outside grid support).
double interpolate_at(const GridField& u, const Vec4& x);

} // namespace cma::solver
