#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cma/matrix.hpp"

// Congruence diagonalization of a symmetric matrix by leading principal
// minors, and the tolerance-based definiteness verdicts used by every
// certificate.

namespace cma::congruence {

struct MinorSequence {
  std::vector<double> minors;  // P_1 .. P_n
  int dimension = 0;
};

struct CongruenceResult {
  // Upper unitriangular transform C, row-major n x n; det(C) = 1.
  std::vector<double> transform;
  // Predicted diagonal (P_1, P_2/P_1, ..., P_n/P_{n-1}) of C^T A C.
  std::vector<double> diagonal;
  int dimension = 0;
};

enum class Definiteness { positive_definite, positive_semidefinite, indefinite };

const char* to_string(Definiteness d);

struct SingularMinorError : std::runtime_error {
  int k;  // 1-based index of the offending leading minor
  explicit SingularMinorError(int k_)
      : std::runtime_error("leading principal minor P_" + std::to_string(k_) +
                           " is numerically zero"),
        k(k_) {}
};

/// P_k = det of the top-left k x k block, k = 1..n. One fraction-free
/// elimination pass over the growing leading blocks; falls back to pivoted
/// LU per block if a pivot vanishes en route.
MinorSequence leading_minors(const SymmetricMatrix& A);

/// Builds the block-elimination transform of the minor lemma: C^T A C =
/// diag(P_1, P_2/P_1, ..., P_n/P_{n-1}). Requires P_1..P_{n-1} nonzero
/// (relative to max|A|^k); throws SingularMinorError naming the offender.
CongruenceResult congruent_diagonalize(const SymmetricMatrix& A);

/// Eigenvalue-based verdict with scale = max(|lambda_min|, |lambda_max|):
/// positive_definite  if lambda_min >  tol * scale,
/// positive_semidefinite if lambda_min >= -tol * scale,
/// indefinite otherwise.
Definiteness classify_definiteness(const SymmetricMatrix& A, double tol);

} // namespace cma::congruence
