#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cma/congruence.hpp"
#include "cma/monge_ampere.hpp"
#include "cma/report.hpp"

// Exact verification of the constant-rank algebra at degenerate on-shell
// jets. Every "modulo phi" relation of the minimal-rank analysis becomes an
// exact identity once the bad Hessian entries are pinned to zero and the jet
// is put exactly on-shell, so the checks here run at zero analytic slack and
// residual tolerances only absorb rounding.

namespace cma::cert {

struct InfeasibleConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReductionUndefinedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// On-shell jet with diagonal Hessian whose trailing eigenvalues vanish:
/// diag(v11, v22, 0, 0) at rank 2, diag(v11, v22, v33, 0) at rank 3.
struct DegenerateJet {
  monge::Jet2 jet;
  int rank_level = 0;
};

/// Solves v22 from F = 0 with hess = diag(v11, v22, 0, 0). Throws
/// InfeasibleConfigError when the solved v22 is nonpositive or undefined.
DegenerateJet make_rank2_jet(double v, const monge::Vec4& grad, double v11);

/// Solves v22 from F = 0 with hess = diag(v11, v22, v33, 0).
DegenerateJet make_rank3_jet(double v, const monge::Vec4& grad, double v11, double v33);

struct CertBundle {
  SymmetricMatrix matrix;
  congruence::MinorSequence minors;
  CertificateReport report;
};

/// The 3x3 quadratic-form matrix of the rank-2 analysis in variables
/// (v11a, v12a, v22a), with its minor checks: P3 = 0 and
/// P2 = (vF^v)^2/v11^2 (F11 F22 - (F12)^2).
CertBundle claim1_matrix(const DegenerateJet& djet);

/// Relative gap between the raw second-derivative expansion (gradient slot
/// eliminated through the differentiated equation) and (2/(vF^v)^2) X^T A X.
double rank2_quadratic_equivalence(const DegenerateJet& djet,
                                   const std::array<double, 3>& X);

/// The 6x6 matrix of the rank-3 analysis in variables
/// (v114, v224, v334, v134, v124, v234); entries (1,4), (2,4), (3,4) vanish.
CertBundle bigA_matrix(const DegenerateJet& djet);

struct BlockReduceResult {
  SymmetricMatrix A1{3};
  SymmetricMatrix A2{3};
  CertificateReport report;  // off-block, closed-form match, reconstruction
};

/// Applies the four congruence column/row operations that decouple the 6x6
/// matrix into the two 3x3 blocks, checks the result against the closed-form
/// blocks (including b11, b12, b22), and reconstructs the original matrix by
/// the inverse congruence. Throws ReductionUndefinedError when F11 or F22
/// vanishes.
BlockReduceResult block_reduce(const CertBundle& bundle, const DegenerateJet& djet);

CertificateReport claim2_check(const SymmetricMatrix& A1, const DegenerateJet& djet);
CertificateReport claim3_check(const SymmetricMatrix& A2, const DegenerateJet& djet);

double rank3_quadratic_equivalence(const DegenerateJet& djet,
                                   const std::array<double, 6>& X);

/// max of the relative residuals of
///   F11 F22 - (F12)^2 - (F23)^2 = v^2,
///   vF^v = v^2 (v11+v33) v22 + 1,
///   vF^v = F11 v11 + F22 v22 + F33 v33,
/// all exact at rank-3 jets.
double identity_3_40(const DegenerateJet& djet);

/// Random feasible jets: v in [-3, -0.2], gradient entries in [-1, 1],
/// positive Hessian entries in [0.1, 5]; configurations with solved v22
/// outside [1e-3, 1e3] are rejected to keep conditioning bounded, and rank-3
/// sampling additionally requires F11, F22 > 1e-3 (the reduction and minor
/// formulas divide by them).
DegenerateJet sample_rank2_jet(std::mt19937_64& rng);
DegenerateJet sample_rank3_jet(std::mt19937_64& rng);

struct Rank2Row {
  double v, g1, g2, g3, g4, v11, v22;
  double p3_zero, p2_formula, col_prop, equiv_max;
  std::string verdict;
  bool pass;
};

struct Rank3Row {
  double v, g1, g2, g3, g4, v11, v22, v33;
  double id340, offblock, block_match, reconstruction;
  double a1_p2_formula, a1_p3_zero, a2_p1_formula, a2_p2_formula, a2_p3_formula;
  double equiv_max;
  std::string verdict_a1, verdict_a2;
  bool pass;
};

struct SuiteSummary {
  std::string name;
  int size = 0;
  std::uint64_t seed = 0;
  int failures = 0;
  std::vector<std::pair<std::string, double>> max_residuals;
  bool passed() const { return failures == 0; }
};

struct Rank2Suite {
  std::vector<Rank2Row> rows;
  SuiteSummary summary;
};

struct Rank3Suite {
  std::vector<Rank3Row> rows;
  SuiteSummary summary;
};

Rank2Suite run_rank2_suite(int size, std::uint64_t seed, int x_per_jet = 10);
Rank3Suite run_rank3_suite(int size, std::uint64_t seed, int x_per_jet = 10);

} // namespace cma::cert
