#pragma once

#include <span>
#include <vector>

#include "cma/matrix.hpp"

// Elementary symmetric function calculus on eigenvalue spectra and diagonal
// matrices, plus the quotient auxiliary function q = sigma_{l+2}/sigma_{l+1}
// with its exact first and second derivatives.

namespace cma::symfun {

/// sigma_k of a spectrum; sigma_0 = 1 and sigma_{-1} = sigma_{n+1} = 0.
/// Throws std::invalid_argument for k outside [-1, n+1] or an empty spectrum.
double sigma_k(std::span<const double> lambda, int k);

/// All of e_0..e_n in one pass of the stable append recurrence.
std::vector<double> sigma_all(std::span<const double> lambda);

/// sigma_k with the excluded entries replaced by zero. Indices are 0-based,
/// distinct, and in range; throws std::invalid_argument otherwise.
double sigma_k_excluding(std::span<const double> lambda, int k,
                         std::span<const int> excluded);

/// d sigma_k / dA at a diagonal matrix: diag entries sigma_{k-1}(A|i).
/// Throws std::invalid_argument if H is not diagonal under the 1e-12 rule.
SymmetricMatrix sigma_gradient(const SymmetricMatrix& H, int k);

/// d^2 sigma_k / dA^2 at a diagonal matrix:
///   T[i][i][p][p] =  sigma_{k-2}(A|ip)   for i != p,
///   T[i][j][j][i] = -sigma_{k-2}(A|ij)   for i != j,
/// zero otherwise.
Tensor4 sigma_hessian(const SymmetricMatrix& H, int k);

struct AuxFunctionValue {
  double sigma_l1;  // sigma_{l+1}
  double q;         // sigma_{l+2}/sigma_{l+1}, or 0 at the sigma_{l+1} = 0 branch
  double phi;       // sigma_l1 + q
  int rank_level;
};

/// Quotient auxiliary function on the eigenvalues of a symmetric H.
/// Requires 0 <= l <= n-1.
AuxFunctionValue phi_aux(const SymmetricMatrix& H, int l);

/// Exact gradient of q at a diagonal matrix with sigma_{l+1}(H) > 0
/// (quotient rule on the sigma_k gradients). Throws std::domain_error at
/// sigma_{l+1} <= 0.
SymmetricMatrix q_gradient(const SymmetricMatrix& H, int l);

/// Exact second-derivative tensor of q under the same preconditions.
Tensor4 q_hessian(const SymmetricMatrix& H, int l);

} // namespace cma::symfun
