#include "cma/congruence.hpp"

#include <algorithm>
#include <cmath>

namespace cma::congruence {

const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::positive_definite:
      return "positive_definite";
    case Definiteness::positive_semidefinite:
      return "positive_semidefinite";
    case Definiteness::indefinite:
      return "indefinite";
  }
  return "unknown";
}

MinorSequence leading_minors(const SymmetricMatrix& A) {
  const int n = A.size();
  MinorSequence out;
  out.dimension = n;
  out.minors.assign(n, 0.0);

  // Bareiss fraction-free elimination: after step k the (k,k) entry equals
  // P_{k+1}. Breaks down if an intermediate minor is exactly zero; the
  // remaining minors then come from pivoted LU on their leading blocks.
  std::vector<double> m(A.data().begin(), A.data().end());
  auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * n + j]; };

  double prev = 1.0;
  int done = 0;
  for (int k = 0; k < n; ++k) {
    out.minors[k] = at(k, k);
    done = k + 1;
    if (k == n - 1) break;
    if (at(k, k) == 0.0) break;
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        at(i, j) = (at(k, k) * at(i, j) - at(i, k) * at(k, j)) / prev;
      }
    }
    prev = at(k, k);
  }
  for (int k = done; k < n; ++k) {
    const int dim = k + 1;
    std::vector<double> blk(static_cast<std::size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) blk[static_cast<std::size_t>(i) * dim + j] = A(i, j);
    out.minors[k] = determinant_lu(blk, dim);
  }
  return out;
}

CongruenceResult congruent_diagonalize(const SymmetricMatrix& A) {
  const int n = A.size();
  const MinorSequence ms = leading_minors(A);
  const double amax = A.max_abs();

  for (int k = 1; k <= n - 1; ++k) {
    const double scale = std::pow(std::max(amax, 1e-300), k);
    if (std::fabs(ms.minors[k - 1]) <= 1e-12 * scale) {
      throw SingularMinorError(k);
    }
  }

  CongruenceResult out;
  out.dimension = n;
  out.transform.assign(static_cast<std::size_t>(n) * n, 0.0);
  auto C = [&](int i, int j) -> double& {
    return out.transform[static_cast<std::size_t>(i) * n + j];
  };
  for (int i = 0; i < n; ++i) C(i, i) = 1.0;

  // Peel columns from the right: each step solves A_{m-1} w = alpha and
  // right-multiplies by the elementary block C1 = [I, -w; 0, 1].
  for (int m = n; m >= 2; --m) {
    const int d = m - 1;
    std::vector<double> blk(static_cast<std::size_t>(d) * d);
    std::vector<double> alpha(d);
    for (int i = 0; i < d; ++i) {
      alpha[i] = A(i, m - 1);
      for (int j = 0; j < d; ++j) blk[static_cast<std::size_t>(i) * d + j] = A(i, j);
    }
    const std::vector<double> w = solve_lu(blk, alpha, d);
    for (int r = 0; r < n; ++r) {
      double acc = 0.0;
      for (int j = 0; j < d; ++j) acc += C(r, j) * w[j];
      C(r, m - 1) -= acc;
    }
  }

  out.diagonal.assign(n, 0.0);
  double prev = 1.0;
  for (int k = 0; k < n; ++k) {
    out.diagonal[k] = ms.minors[k] / prev;
    prev = ms.minors[k];
  }
  return out;
}

Definiteness classify_definiteness(const SymmetricMatrix& A, double tol) {
  const std::vector<double> ev = jacobi_eigenvalues(A);
  const double lo = ev.front();
  const double hi = ev.back();
  const double scale = std::max(std::fabs(lo), std::fabs(hi));
  if (lo > tol * scale) return Definiteness::positive_definite;
  if (lo >= -tol * scale) return Definiteness::positive_semidefinite;
  return Definiteness::indefinite;
}

} // namespace cma::congruence
