#include "cma/certificates.hpp"

#include <algorithm>
#include <cmath>

namespace cma::cert {

namespace {

constexpr double kTiny = 1e-300;

double rel_gap(double a, double b, double extra_scale = 0.0) {
  const double scale = std::max({std::fabs(a), std::fabs(b), extra_scale, kTiny});
  return std::fabs(a - b) / scale;
}

// Jet-level quantities every certificate formula consumes. Values are exact
// closed forms at diagonal jets with trailing zeros.
struct Q {
  double v, v11, v22, v33;
  double F11, F22, F33, F12, F23;
  double Fv, vFv;
};

Q quantities(const DegenerateJet& djet) {
  const monge::FDerivBundle b = monge::F_derivatives(djet.jet);
  Q q;
  q.v = djet.jet.v;
  q.v11 = djet.jet.hess(0, 0);
  q.v22 = djet.jet.hess(1, 1);
  q.v33 = djet.jet.hess(2, 2);
  q.F11 = b.H(0, 0);
  q.F22 = b.H(1, 1);
  q.F33 = b.H(2, 2);
  q.F12 = b.H(0, 1);
  q.F23 = b.H(1, 2);
  q.Fv = b.dv;
  q.vFv = q.v * b.dv;
  return q;
}

DegenerateJet finish_jet(double v, const monge::Vec4& grad, double v11, double v22,
                         double v33, int rank) {
  if (!std::isfinite(v22) || v22 <= 0.0) {
    throw InfeasibleConfigError("solved v22 is nonpositive or undefined");
  }
  DegenerateJet djet;
  djet.rank_level = rank;
  djet.jet.v = v;
  djet.jet.grad = grad;
  djet.jet.hess = SymmetricMatrix(4);
  djet.jet.hess.set(0, 0, v11);
  djet.jet.hess.set(1, 1, v22);
  djet.jet.hess.set(2, 2, v33);

  const double F = monge::F_eval(djet.jet);
  const double scale = std::max(1.0, std::fabs(v * v * (v11 + v33) * v22));
  if (std::fabs(F) > 1e-12 * scale) {
    throw InfeasibleConfigError("constructed jet is not on-shell");
  }
  return djet;
}

// Raw second-derivative expansion over the good block, with the gradient slot
// eliminated through the differentiated equation. X is the symmetric matrix
// of third derivatives padded with zeros in the bad rows/columns. Also
// accumulates the largest absolute term for relative residuals.
double raw_expansion(const monge::FDerivBundle& b, const monge::Jet2& jet,
                     const double Xm[4][4], int glen, double& scale) {
  auto track = [&scale](double t) {
    scale = std::max(scale, std::fabs(t));
    return t;
  };

  double va_num = 0.0;
  for (int i = 0; i < glen; ++i)
    for (int j = 0; j < glen; ++j) va_num += b.H(i, j) * Xm[i][j];
  const double va = -va_num / b.dv;

  double raw = 0.0;
  for (int i = 0; i < glen; ++i)
    for (int j = 0; j < glen; ++j)
      for (int k = 0; k < glen; ++k)
        for (int l = 0; l < glen; ++l)
          raw += track(b.HH(i, j, k, l) * Xm[i][j] * Xm[k][l]);

  for (int i = 0; i < glen; ++i)
    for (int j = 0; j < glen; ++j) raw += track(2.0 * b.Hv(i, j) * Xm[i][j] * va);

  raw += track(b.d2vv * va * va);

  for (int p = 0; p < glen; ++p) {
    const double vpp = jet.hess(p, p);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        raw += track(2.0 / vpp * b.H(i, j) * Xm[p][i] * Xm[p][j]);
  }
  return raw;
}

double quad_form(const SymmetricMatrix& A, const double* X, int n, double& scale) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double t = A(i, j) * X[i] * X[j];
      scale = std::max(scale, std::fabs(t));
      s += t;
    }
  }
  return s;
}

} // namespace

DegenerateJet make_rank2_jet(double v, const monge::Vec4& grad, double v11) {
  if (!(v < 0.0) || !(v11 > 0.0)) {
    throw InfeasibleConfigError("make_rank2_jet requires v < 0 and v11 > 0");
  }
  const double T1 = grad[1] * grad[1] + grad[3] * grad[3];
  const double T2 = grad[0] * grad[0] + grad[2] * grad[2];
  const double denom = v * v * v11 + v * T2;
  const double v22 = (1.0 - v * T1 * v11) / denom;
  return finish_jet(v, grad, v11, v22, 0.0, 2);
}

DegenerateJet make_rank3_jet(double v, const monge::Vec4& grad, double v11, double v33) {
  if (!(v < 0.0) || !(v11 > 0.0) || !(v33 > 0.0)) {
    throw InfeasibleConfigError("make_rank3_jet requires v < 0 and v11, v33 > 0");
  }
  const double T1 = grad[1] * grad[1] + grad[3] * grad[3];
  const double T2 = grad[0] * grad[0] + grad[2] * grad[2];
  const double s13 = v11 + v33;
  const double denom = v * v * s13 + v * T2;
  const double v22 = (1.0 - v * T1 * s13) / denom;
  return finish_jet(v, grad, v11, v22, v33, 3);
}

CertBundle claim1_matrix(const DegenerateJet& djet) {
  if (djet.rank_level != 2) {
    throw std::invalid_argument("claim1_matrix requires a rank-2 jet");
  }
  const Q q = quantities(djet);

  CertBundle out;
  out.matrix = SymmetricMatrix(3);
  SymmetricMatrix& A = out.matrix;
  A.set(0, 0, q.v22 / q.v11 * q.F11 * q.F22);
  A.set(0, 1, q.F12 / q.v11 * (q.vFv - 2.0 * q.F11 * q.v11));
  A.set(0, 2, -q.F11 * q.F22);
  A.set(1, 1, (q.vFv * q.vFv - 4.0 * q.v11 * q.v22 * q.F12 * q.F12) / (q.v11 * q.v22));
  A.set(1, 2, q.F12 / q.v22 * (q.vFv - 2.0 * q.F22 * q.v22));
  A.set(2, 2, q.v11 / q.v22 * q.F11 * q.F22);

  out.minors = congruence::leading_minors(A);
  const double amax = std::max(A.max_abs(), kTiny);

  out.report.subject = "claim1";
  out.report.add("P3_zero", std::fabs(out.minors.minors[2]) / (amax * amax * amax), 1e-10);
  const double p2_closed =
      q.vFv * q.vFv / (q.v11 * q.v11) * (q.F11 * q.F22 - q.F12 * q.F12);
  out.report.add("P2_formula", rel_gap(out.minors.minors[1], p2_closed), 1e-10);

  // Third column is -(v11/v22) times the first.
  double col_res = 0.0;
  const double ratio = q.v11 / q.v22;
  for (int r = 0; r < 3; ++r) {
    col_res = std::max(col_res, std::fabs(A(r, 2) + ratio * A(r, 0)));
  }
  out.report.add("col13_proportional", col_res / (amax * std::max(1.0, ratio)), 1e-10);
  return out;
}

double rank2_quadratic_equivalence(const DegenerateJet& djet,
                                   const std::array<double, 3>& X) {
  if (djet.rank_level != 2) {
    throw std::invalid_argument("rank2_quadratic_equivalence requires a rank-2 jet");
  }
  const monge::FDerivBundle b = monge::F_derivatives(djet.jet);

  double Xm[4][4] = {};
  Xm[0][0] = X[0];
  Xm[0][1] = Xm[1][0] = X[1];
  Xm[1][1] = X[2];

  double scale = kTiny;
  const double raw = raw_expansion(b, djet.jet, Xm, 2, scale);

  const CertBundle bundle = claim1_matrix(djet);
  const double vFv = djet.jet.v * b.dv;
  double qscale = kTiny;
  const double quad = 2.0 / (vFv * vFv) * quad_form(bundle.matrix, X.data(), 3, qscale);
  scale = std::max(scale, 2.0 / (vFv * vFv) * qscale);

  return std::fabs(raw - quad) / std::max({scale, std::fabs(raw), std::fabs(quad)});
}

CertBundle bigA_matrix(const DegenerateJet& djet) {
  if (djet.rank_level != 3) {
    throw std::invalid_argument("bigA_matrix requires a rank-3 jet");
  }
  const Q q = quantities(djet);
  const double v2 = q.v * q.v;

  CertBundle out;
  out.matrix = SymmetricMatrix(6);
  SymmetricMatrix& A = out.matrix;

  A.set(0, 0, q.F11 / q.v11 * (v2 * q.v22 * q.v33 * q.vFv + q.F22 * q.v22 + q.F33 * q.v33));
  A.set(0, 1, -q.F11 * q.F22);
  A.set(0, 2, -q.F11 * (v2 * q.v22 * q.vFv + q.F11));
  A.set(0, 3, 0.0);
  A.set(0, 4, q.F12 / q.v11 * (v2 * q.v22 * q.v33 * q.vFv + q.vFv - 2.0 * q.F11 * q.v11));
  A.set(0, 5, -q.F23 * (v2 * q.v22 * q.vFv + 2.0 * q.F11));

  A.set(1, 1, q.F22 / q.v22 * (q.F11 * q.v11 + q.F33 * q.v33));
  A.set(1, 2, -q.F22 * q.F33);
  A.set(1, 3, 0.0);
  A.set(1, 4, q.F12 / q.v22 * (q.vFv - 2.0 * q.F22 * q.v22));
  A.set(1, 5, q.F23 / q.v22 * (q.vFv - 2.0 * q.F22 * q.v22));

  A.set(2, 2, q.F33 / q.v33 * (v2 * q.v11 * q.v22 * q.vFv + q.F11 * q.v11 + q.F22 * q.v22));
  A.set(2, 3, 0.0);
  A.set(2, 4, -q.F12 * (v2 * q.v22 * q.vFv + 2.0 * q.F33));
  A.set(2, 5, q.F23 / q.v33 * (v2 * q.v11 * q.v22 * q.vFv + q.vFv - 2.0 * q.F33 * q.v33));

  A.set(3, 3, (q.F33 / q.v11 + q.F11 / q.v33) * q.vFv * q.vFv);
  A.set(3, 4, q.F23 / q.v11 * q.vFv * q.vFv);
  A.set(3, 5, q.F12 / q.v33 * q.vFv * q.vFv);

  A.set(4, 4, (v2 * q.v22 * q.v33 + 1.0 - q.F33 * q.v33) / (q.v11 * q.v22) * q.vFv * q.vFv -
                  4.0 * q.F12 * q.F12);
  A.set(4, 5, -4.0 * q.F12 * q.F23);
  A.set(5, 5, (v2 * q.v11 * q.v22 + 1.0 - q.F11 * q.v11) / (q.v22 * q.v33) * q.vFv * q.vFv -
                  4.0 * q.F23 * q.F23);

  out.minors = congruence::leading_minors(A);
  out.report.subject = "bigA";
  return out;
}

BlockReduceResult block_reduce(const CertBundle& bundle, const DegenerateJet& djet) {
  if (djet.rank_level != 3) {
    throw std::invalid_argument("block_reduce requires a rank-3 jet");
  }
  const Q q = quantities(djet);
  const double fscale = std::max(1.0, q.v * q.v * std::max(q.v22, q.v11 + q.v33));
  if (std::fabs(q.F11) < 1e-12 * fscale || std::fabs(q.F22) < 1e-12 * fscale) {
    throw ReductionUndefinedError("block_reduce: vanishing F11 or F22");
  }

  const SymmetricMatrix& A = bundle.matrix;
  const double amax = std::max(A.max_abs(), kTiny);

  // C = I + N with N supported on (source row, target column) pairs
  // (0,4), (1,4), (2,5), (1,5); N^2 = 0, so C^{-1} = I - N.
  double N[6][6] = {};
  N[0][4] = -q.F12 / q.F11;
  N[1][4] = -q.F12 / q.F22;
  N[2][5] = -q.F23 / q.F11;
  N[1][5] = -q.F23 / q.F22;

  auto congruent = [&](const SymmetricMatrix& M, double sgn) {
    // (I + sgn N)^T M (I + sgn N)
    SymmetricMatrix R(6);
    double MN[6][6] = {};
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        double s = M(i, j);
        for (int k = 0; k < 6; ++k) s += sgn * M(i, k) * N[k][j];
        MN[i][j] = s;
      }
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) {
        double s = MN[i][j];
        for (int k = 0; k < 6; ++k) s += sgn * N[k][i] * MN[k][j];
        R.set(i, j, s);
      }
    return R;
  };

  const SymmetricMatrix R = congruent(A, 1.0);

  BlockReduceResult out;
  out.report.subject = "block_reduce";

  double offblock = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 3; j < 6; ++j) offblock = std::max(offblock, std::fabs(R(i, j)));
  out.report.add("offblock", offblock / amax, 1e-12);

  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      out.A1.set(i, j, R(i, j));
      out.A2.set(i, j, R(i + 3, j + 3));
    }

  // Closed-form blocks: A1 is the untouched leading block; A2 carries the
  // displayed b11, b12, b22.
  const double v2 = q.v * q.v;
  SymmetricMatrix A2cf(3);
  A2cf.set(0, 0, (q.F33 / q.v11 + q.F11 / q.v33) * q.vFv * q.vFv);
  A2cf.set(0, 1, q.F23 / q.v11 * q.vFv * q.vFv);
  A2cf.set(0, 2, q.F12 / q.v33 * q.vFv * q.vFv);
  const double b11 =
      (q.F11 / q.v22 + q.F22 / q.v11 - v2) * q.vFv * q.vFv -
      ((v2 * q.v22 * q.v33 + 1.0) / (q.F11 * q.v11) + 1.0 / (q.F22 * q.v22)) *
          q.F12 * q.F12 * q.vFv;
  const double b12 =
      q.F12 * q.F23 * (v2 * q.v22 / q.F11 - 1.0 / (q.F22 * q.v22)) * q.vFv;
  const double b22 =
      (q.F22 / q.v33 + q.F33 / q.v22 - v2) * q.vFv * q.vFv -
      (1.0 / (q.F22 * q.v22) + (v2 * q.v11 * q.v22 + 1.0) / (q.F33 * q.v33)) *
          q.F23 * q.F23 * q.vFv;
  A2cf.set(1, 1, b11);
  A2cf.set(1, 2, b12);
  A2cf.set(2, 2, b22);

  double match = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      match = std::max(match, std::fabs(out.A1(i, j) - A(i, j)));
      match = std::max(match, std::fabs(out.A2(i, j) - A2cf(i, j)));
    }
  out.report.add("block_match", match / amax, 1e-10);

  // Undo the congruence on A1 (+) A2 and compare with A.
  SymmetricMatrix D(6);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      D.set(i, j, out.A1(i, j));
      D.set(i + 3, j + 3, out.A2(i, j));
    }
  const SymmetricMatrix Arec = congruent(D, -1.0);
  double rec = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) rec = std::max(rec, std::fabs(Arec(i, j) - A(i, j)));
  out.report.add("reconstruction", rec / amax, 1e-12);

  return out;
}

CertificateReport claim2_check(const SymmetricMatrix& A1, const DegenerateJet& djet) {
  if (djet.rank_level != 3) {
    throw std::invalid_argument("claim2_check requires a rank-3 jet");
  }
  const Q q = quantities(djet);
  const congruence::MinorSequence ms = congruence::leading_minors(A1);
  const double amax = std::max(A1.max_abs(), kTiny);

  CertificateReport rep;
  rep.subject = "claim2";
  rep.add_condition("P1_positive", ms.minors[0] > 0.0);
  const double p2_closed = q.F11 * q.F11 * q.F22 * q.v33 / (q.v11 * q.v22) * q.vFv * q.vFv;
  rep.add("P2_formula", rel_gap(ms.minors[1], p2_closed), 1e-10);
  rep.add("P3_zero", std::fabs(ms.minors[2]) / (amax * amax * amax), 1e-10);
  rep.add_verdict("definiteness",
                  congruence::to_string(congruence::classify_definiteness(A1, 1e-9)),
                  "positive_semidefinite");
  return rep;
}

CertificateReport claim3_check(const SymmetricMatrix& A2, const DegenerateJet& djet) {
  if (djet.rank_level != 3) {
    throw std::invalid_argument("claim3_check requires a rank-3 jet");
  }
  const Q q = quantities(djet);
  const congruence::MinorSequence ms = congruence::leading_minors(A2);
  const double v2 = q.v * q.v;
  const double vFv2 = q.vFv * q.vFv;
  const double vFv4 = vFv2 * vFv2;

  CertificateReport rep;
  rep.subject = "claim3";

  const double p1_closed = (q.F33 / q.v11 + q.F11 / q.v33) * vFv2;
  rep.add("P1_formula", rel_gap(ms.minors[0], p1_closed), 1e-10);
  rep.add_condition("P1_positive", ms.minors[0] > 0.0);

  const double p2_closed =
      (v2 + q.F23 * q.F23) / (q.v11 * q.v22 * q.v33 * q.F22) * vFv4 +
      v2 / (q.v11 * q.v11) * vFv4;
  rep.add("P2_formula", rel_gap(ms.minors[1], p2_closed), 1e-9);
  rep.add_condition("P2_positive", ms.minors[1] > 0.0);

  const double F22v22 = q.F22 * q.v22;
  const double bracket = v2 * v2 * q.v11 * q.v33 * F22v22 * F22v22 +
                         v2 * q.v33 * q.v33 * F22v22 * (v2 + q.F12 * q.F12) +
                         v2 * q.v11 * q.v11 * F22v22 * (v2 + q.F23 * q.F23) +
                         v2 * v2 * q.v11 * q.v33 +
                         v2 * q.v11 * q.v33 * (q.F12 * q.F12 + q.F23 * q.F23);
  const double p3_closed =
      vFv4 * vFv2 /
      ((q.v11 + q.v33) * std::pow(q.v11 * q.v22 * q.v33, 2) * q.F11 * q.F22 * q.F22) *
      bracket;
  rep.add("P3_formula", rel_gap(ms.minors[2], p3_closed), 1e-8);
  rep.add_condition("P3_positive", ms.minors[2] > 0.0);

  rep.add_verdict("definiteness",
                  congruence::to_string(congruence::classify_definiteness(A2, 1e-9)),
                  "positive_definite");
  return rep;
}

double rank3_quadratic_equivalence(const DegenerateJet& djet,
                                   const std::array<double, 6>& X) {
  if (djet.rank_level != 3) {
    throw std::invalid_argument("rank3_quadratic_equivalence requires a rank-3 jet");
  }
  const monge::FDerivBundle b = monge::F_derivatives(djet.jet);

  double Xm[4][4] = {};
  Xm[0][0] = X[0];
  Xm[1][1] = X[1];
  Xm[2][2] = X[2];
  Xm[0][2] = Xm[2][0] = X[3];
  Xm[0][1] = Xm[1][0] = X[4];
  Xm[1][2] = Xm[2][1] = X[5];

  double scale = kTiny;
  const double raw = raw_expansion(b, djet.jet, Xm, 3, scale);

  const CertBundle bundle = bigA_matrix(djet);
  const double vFv = djet.jet.v * b.dv;
  double qscale = kTiny;
  const double quad = 2.0 / (vFv * vFv) * quad_form(bundle.matrix, X.data(), 6, qscale);
  scale = std::max(scale, 2.0 / (vFv * vFv) * qscale);

  return std::fabs(raw - quad) / std::max({scale, std::fabs(raw), std::fabs(quad)});
}

double identity_3_40(const DegenerateJet& djet) {
  if (djet.rank_level != 3) {
    throw std::invalid_argument("identity_3_40 requires a rank-3 jet");
  }
  const Q q = quantities(djet);
  const double v2 = q.v * q.v;

  const double lhs1 = q.F11 * q.F22 - q.F12 * q.F12 - q.F23 * q.F23;
  const double s1 = std::max({std::fabs(q.F11 * q.F22), q.F12 * q.F12, q.F23 * q.F23, v2});
  const double r1 = std::fabs(lhs1 - v2) / std::max(s1, kTiny);

  const double rhs2 = v2 * (q.v11 + q.v33) * q.v22 + 1.0;
  const double r2 = rel_gap(q.vFv, rhs2, 1.0);

  const double rhs3 = q.F11 * q.v11 + q.F22 * q.v22 + q.F33 * q.v33;
  const double s3 = std::max({std::fabs(q.F11 * q.v11), std::fabs(q.F22 * q.v22),
                              std::fabs(q.F33 * q.v33), std::fabs(q.vFv)});
  const double r3 = std::fabs(q.vFv - rhs3) / std::max(s3, kTiny);

  return std::max({r1, r2, r3});
}

namespace {

monge::Vec4 random_grad(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng), u(rng), u(rng)};
}

} // namespace

DegenerateJet sample_rank2_jet(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uv(-3.0, -0.2);
  std::uniform_real_distribution<double> uh(0.1, 5.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double v = uv(rng);
    const monge::Vec4 g = random_grad(rng);
    const double v11 = uh(rng);
    try {
      DegenerateJet djet = make_rank2_jet(v, g, v11);
      const double v22 = djet.jet.hess(1, 1);
      if (v22 < 1e-3 || v22 > 1e3) continue;
      return djet;
    } catch (const InfeasibleConfigError&) {
      continue;
    }
  }
  throw InfeasibleConfigError("sample_rank2_jet: no feasible configuration found");
}

DegenerateJet sample_rank3_jet(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uv(-3.0, -0.2);
  std::uniform_real_distribution<double> uh(0.1, 5.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double v = uv(rng);
    const monge::Vec4 g = random_grad(rng);
    const double v11 = uh(rng);
    const double v33 = uh(rng);
    try {
      DegenerateJet djet = make_rank3_jet(v, g, v11, v33);
      const double v22 = djet.jet.hess(1, 1);
      if (v22 < 1e-3 || v22 > 1e3) continue;
      const Q q = quantities(djet);
      if (q.F11 <= 1e-3 || q.F22 <= 1e-3) continue;
      return djet;
    } catch (const InfeasibleConfigError&) {
      continue;
    }
  }
  throw InfeasibleConfigError("sample_rank3_jet: no feasible configuration found");
}

Rank2Suite run_rank2_suite(int size, std::uint64_t seed, int x_per_jet) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);

  Rank2Suite suite;
  suite.rows.reserve(size);
  double max_p3 = 0.0, max_p2 = 0.0, max_col = 0.0, max_eq = 0.0;
  int failures = 0;

  for (int i = 0; i < size; ++i) {
    const DegenerateJet djet = sample_rank2_jet(rng);
    const CertBundle bundle = claim1_matrix(djet);

    Rank2Row row;
    row.v = djet.jet.v;
    row.g1 = djet.jet.grad[0];
    row.g2 = djet.jet.grad[1];
    row.g3 = djet.jet.grad[2];
    row.g4 = djet.jet.grad[3];
    row.v11 = djet.jet.hess(0, 0);
    row.v22 = djet.jet.hess(1, 1);
    row.p3_zero = bundle.report.residual("P3_zero");
    row.p2_formula = bundle.report.residual("P2_formula");
    row.col_prop = bundle.report.residual("col13_proportional");

    row.equiv_max = 0.0;
    for (int k = 0; k < x_per_jet; ++k) {
      const std::array<double, 3> X = {ux(rng), ux(rng), ux(rng)};
      row.equiv_max = std::max(row.equiv_max, rank2_quadratic_equivalence(djet, X));
    }

    const auto verdict = congruence::classify_definiteness(bundle.matrix, 1e-9);
    row.verdict = congruence::to_string(verdict);
    row.pass = bundle.report.passed && row.equiv_max <= 1e-10 &&
               verdict == congruence::Definiteness::positive_semidefinite;

    max_p3 = std::max(max_p3, row.p3_zero);
    max_p2 = std::max(max_p2, row.p2_formula);
    max_col = std::max(max_col, row.col_prop);
    max_eq = std::max(max_eq, row.equiv_max);
    if (!row.pass) ++failures;
    suite.rows.push_back(std::move(row));
  }

  suite.summary.name = "rank2";
  suite.summary.size = size;
  suite.summary.seed = seed;
  suite.summary.failures = failures;
  suite.summary.max_residuals = {{"P3_zero", max_p3},
                                 {"P2_formula", max_p2},
                                 {"col13_proportional", max_col},
                                 {"quadratic_equivalence", max_eq}};
  return suite;
}

Rank3Suite run_rank3_suite(int size, std::uint64_t seed, int x_per_jet) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);

  Rank3Suite suite;
  suite.rows.reserve(size);
  double max_id = 0.0, max_off = 0.0, max_match = 0.0, max_rec = 0.0;
  double max_a1p2 = 0.0, max_a1p3 = 0.0, max_a2p1 = 0.0, max_a2p2 = 0.0, max_a2p3 = 0.0;
  double max_eq = 0.0;
  int failures = 0;

  for (int i = 0; i < size; ++i) {
    const DegenerateJet djet = sample_rank3_jet(rng);
    const CertBundle bundle = bigA_matrix(djet);
    const BlockReduceResult red = block_reduce(bundle, djet);
    const CertificateReport c2 = claim2_check(red.A1, djet);
    const CertificateReport c3 = claim3_check(red.A2, djet);

    Rank3Row row;
    row.v = djet.jet.v;
    row.g1 = djet.jet.grad[0];
    row.g2 = djet.jet.grad[1];
    row.g3 = djet.jet.grad[2];
    row.g4 = djet.jet.grad[3];
    row.v11 = djet.jet.hess(0, 0);
    row.v22 = djet.jet.hess(1, 1);
    row.v33 = djet.jet.hess(2, 2);

    row.id340 = identity_3_40(djet);
    row.offblock = red.report.residual("offblock");
    row.block_match = red.report.residual("block_match");
    row.reconstruction = red.report.residual("reconstruction");
    row.a1_p2_formula = c2.residual("P2_formula");
    row.a1_p3_zero = c2.residual("P3_zero");
    row.a2_p1_formula = c3.residual("P1_formula");
    row.a2_p2_formula = c3.residual("P2_formula");
    row.a2_p3_formula = c3.residual("P3_formula");
    row.verdict_a1 = c2.find("definiteness")->verdict;
    row.verdict_a2 = c3.find("definiteness")->verdict;

    row.equiv_max = 0.0;
    for (int k = 0; k < x_per_jet; ++k) {
      const std::array<double, 6> X = {ux(rng), ux(rng), ux(rng),
                                       ux(rng), ux(rng), ux(rng)};
      row.equiv_max = std::max(row.equiv_max, rank3_quadratic_equivalence(djet, X));
    }

    row.pass = red.report.passed && c2.passed && c3.passed &&
               row.id340 <= 1e-12 && row.equiv_max <= 1e-10;

    max_id = std::max(max_id, row.id340);
    max_off = std::max(max_off, row.offblock);
    max_match = std::max(max_match, row.block_match);
    max_rec = std::max(max_rec, row.reconstruction);
    max_a1p2 = std::max(max_a1p2, row.a1_p2_formula);
    max_a1p3 = std::max(max_a1p3, row.a1_p3_zero);
    max_a2p1 = std::max(max_a2p1, row.a2_p1_formula);
    max_a2p2 = std::max(max_a2p2, row.a2_p2_formula);
    max_a2p3 = std::max(max_a2p3, row.a2_p3_formula);
    max_eq = std::max(max_eq, row.equiv_max);
    if (!row.pass) ++failures;
    suite.rows.push_back(std::move(row));
  }

  suite.summary.name = "rank3";
  suite.summary.size = size;
  suite.summary.seed = seed;
  suite.summary.failures = failures;
  suite.summary.max_residuals = {
      {"identity_3_40", max_id},     {"offblock", max_off},
      {"block_match", max_match},    {"reconstruction", max_rec},
      {"A1_P2_formula", max_a1p2},   {"A1_P3_zero", max_a1p3},
      {"A2_P1_formula", max_a2p1},   {"A2_P2_formula", max_a2p2},
      {"A2_P3_formula", max_a2p3},   {"quadratic_equivalence", max_eq}};
  return suite;
}

} // namespace cma::cert
