#pragma once

#include <span>
#include <vector>

#include "cma/solver.hpp"

// Power-transform audit: Hessians of v = -sqrt(-u/2) recovered from the
// solved u-field, eigenvalue/rank maps over the audited region, boundary-strip
// minima, the alpha-sharpness probe, and the ball-to-body deformation sweep.
//
// Finite differences are taken on u (smooth up to the boundary) and pushed
// through the chain rule; differencing v directly would blow up near the
// boundary where its gradient is singular. The audited region keeps a
// two-node collar away from cut cells so every stencil is uniform.

namespace cma::audit {

using solver::Grid4;
using solver::GridField;

struct RankMapEntry {
  std::int64_t node;
  Vec4 coords;
  std::array<double, 4> eigenvalues;  // ascending
  int rank;
  bool strip;
};

struct RankMap {
  std::vector<RankMapEntry> entries;
  int min_rank = 0;
  int max_rank = 0;
  bool constant_rank = false;
  double strip_min_eig = 0.0;     // min lambda_min over strip nodes
  double interior_min_eig = 0.0;  // min lambda_min over all audited nodes
  int audited_count = 0;
  int strip_count = 0;
  double rank_tol = 0.0;
  double strip_eps = 0.0;
};

/// v = -sqrt(-u/2) nodewise. Throws std::domain_error naming the node if
/// u >= 0 at an interior node; cut nodes clamp to v = 0 where u has crossed
/// zero within solver tolerance.
GridField v_field(const GridField& u);

/// True when every node within Chebyshev distance 2 is interior.
bool node_audited(const Grid4& grid, std::int64_t node);

/// Hessian of the transform at an audited node: central differences of u,
/// then v_i = -u_i/(4v), v_ij = -(u_ij + 4 v_i v_j)/(4v).
SymmetricMatrix hessian_v_at(const GridField& u, std::int64_t node);

/// Eigen-decomposes the transform Hessian at every audited node; rank =
/// #{lambda > rank_tol * lambda_max}. Non-constant rank is a reported
/// finding, never an exception.
RankMap rank_map(const GridField& u, double rank_tol, const bodies::StripSpec& strip);

/// Minimum transform-Hessian eigenvalue over the strip-flagged nodes.
/// Throws solver::ResolutionError when the strip holds no audited node.
double strip_audit(const RankMap& map);

/// Minimum eigenvalue of the Hessian of g = -(-u)^alpha over the audited
/// region; requires 0 < alpha < 1.
double alpha_probe(const GridField& u, double alpha);

struct SweepEntry {
  double t = 0.0;
  bool solve_ok = false;
  GridField u;
  solver::SolveReport report;
  RankMap map;
};

/// For each t: interpolate (1-t) B1 + t omega, solve, audit with
/// eps = 4h and the given rank tolerance. Per-t failures are recorded and the
/// sweep continues.
std::vector<SweepEntry> deformation_sweep(const bodies::ConvexBody& omega,
                                          std::span<const double> t_values, double h,
                                          double psi, const solver::SolverConfig& config,
                                          double rank_tol = 1e-6);

} // namespace cma::audit
