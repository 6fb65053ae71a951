#include "cma/monge_ampere.hpp"

#include <cmath>
#include <stdexcept>

namespace cma::monge {

namespace {

inline int slot(int i, int j) { return 4 * i + j; }

// Linear slot functionals entering F. Indices are 0-based, so axis k here is
// x_{k+1} of the operator's (x1, x2, y1, y2) convention.
struct SlotForms {
  double S13, S24;  // h11+h33, h22+h44
  double A12, A21;  // h12+h34, h21+h43
  double B14, B41;  // h14-h32, h41-h23
};

SlotForms forms(const HessSlots& H) {
  SlotForms f;
  f.S13 = H[slot(0, 0)] + H[slot(2, 2)];
  f.S24 = H[slot(1, 1)] + H[slot(3, 3)];
  f.A12 = H[slot(0, 1)] + H[slot(2, 3)];
  f.A21 = H[slot(1, 0)] + H[slot(3, 2)];
  f.B14 = H[slot(0, 3)] - H[slot(2, 1)];
  f.B41 = H[slot(3, 0)] - H[slot(1, 2)];
  return f;
}

// Gradients of the six linear forms with respect to the 16 slots.
struct SlotGrads {
  HessSlots dS13{}, dS24{}, dA12{}, dA21{}, dB14{}, dB41{};
  SlotGrads() {
    dS13[slot(0, 0)] = 1.0;
    dS13[slot(2, 2)] = 1.0;
    dS24[slot(1, 1)] = 1.0;
    dS24[slot(3, 3)] = 1.0;
    dA12[slot(0, 1)] = 1.0;
    dA12[slot(2, 3)] = 1.0;
    dA21[slot(1, 0)] = 1.0;
    dA21[slot(3, 2)] = 1.0;
    dB14[slot(0, 3)] = 1.0;
    dB14[slot(2, 1)] = -1.0;
    dB41[slot(3, 0)] = 1.0;
    dB41[slot(1, 2)] = -1.0;
  }
};

const SlotGrads& grads() {
  static const SlotGrads g;
  return g;
}

HessSlots slots_of(const SymmetricMatrix& H) {
  HessSlots s{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s[slot(i, j)] = H(i, j);
  return s;
}

struct GradTerms {
  double T1, T2, T3, T4;
};

GradTerms terms(const Vec4& g) {
  return {g[1] * g[1] + g[3] * g[3], g[0] * g[0] + g[2] * g[2],
          g[0] * g[1] + g[2] * g[3], g[0] * g[3] - g[1] * g[2]};
}

double q2_of(const SlotForms& f) {
  return f.S13 * f.S24 - f.A12 * f.A21 - f.B14 * f.B41;
}

double q1_of(const SlotForms& f, const GradTerms& t) {
  return t.T1 * f.S13 + t.T2 * f.S24 - t.T3 * (f.A12 + f.A21) - t.T4 * (f.B14 + f.B41);
}

} // namespace

ComplexHessian real_to_complex_hessian(const SymmetricMatrix& Hu) {
  ComplexHessian c;
  c.u11 = (Hu(0, 0) + Hu(2, 2)) / 4.0;
  c.u22 = (Hu(1, 1) + Hu(3, 3)) / 4.0;
  c.re_u12 = (Hu(0, 1) + Hu(2, 3)) / 4.0;
  c.im_u12 = (Hu(0, 3) - Hu(2, 1)) / 4.0;
  return c;
}

double ma_residual_u(const SymmetricMatrix& Hu, double psi) {
  const SlotForms f = forms(slots_of(Hu));
  return q2_of(f) - 16.0 * psi;
}

double F_eval_raw(double v, const Vec4& grad, const HessSlots& H) {
  const SlotForms f = forms(H);
  const GradTerms t = terms(grad);
  return v * v * q2_of(f) + v * q1_of(f, t) - 1.0;
}

double F_eval(const Jet2& jet) {
  return F_eval_raw(jet.v, jet.grad, slots_of(jet.hess));
}

FDerivBundle F_derivatives(const Jet2& jet) {
  const double v = jet.v;
  const Vec4& g = jet.grad;
  const HessSlots H = slots_of(jet.hess);
  const SlotForms f = forms(H);
  const GradTerms t = terms(g);
  const SlotGrads& d = grads();

  const double Q2 = q2_of(f);
  const double Q1 = q1_of(f, t);
  const double SA = f.A12 + f.A21;
  const double SB = f.B14 + f.B41;

  FDerivBundle b;
  b.F = v * v * Q2 + v * Q1 - 1.0;

  HessSlots dQ2{}, dQ1H{};
  for (int s = 0; s < 16; ++s) {
    dQ2[s] = d.dS13[s] * f.S24 + f.S13 * d.dS24[s] - d.dA12[s] * f.A21 -
             f.A12 * d.dA21[s] - d.dB14[s] * f.B41 - f.B14 * d.dB41[s];
    dQ1H[s] = t.T1 * d.dS13[s] + t.T2 * d.dS24[s] - t.T3 * (d.dA12[s] + d.dA21[s]) -
              t.T4 * (d.dB14[s] + d.dB41[s]);
    b.dH[s] = v * v * dQ2[s] + v * dQ1H[s];
    b.d2Hv[s] = 2.0 * v * dQ2[s] + dQ1H[s];
  }

  const Vec4 dQ1g = {
      2.0 * g[0] * f.S24 - g[1] * SA - g[3] * SB,
      2.0 * g[1] * f.S13 - g[0] * SA + g[2] * SB,
      2.0 * g[2] * f.S24 - g[3] * SA + g[1] * SB,
      2.0 * g[3] * f.S13 - g[2] * SA - g[0] * SB,
  };
  for (int k = 0; k < 4; ++k) {
    b.dg[k] = v * dQ1g[k];
    b.d2gv[k] = dQ1g[k];
  }

  b.dv = 2.0 * v * Q2 + Q1;
  b.d2vv = 2.0 * Q2;

  for (int s = 0; s < 16; ++s) {
    for (int r = 0; r < 16; ++r) {
      const double d2q2 = d.dS13[s] * d.dS24[r] + d.dS24[s] * d.dS13[r] -
                          d.dA12[s] * d.dA21[r] - d.dA21[s] * d.dA12[r] -
                          d.dB14[s] * d.dB41[r] - d.dB41[s] * d.dB14[r];
      b.d2HH[16 * s + r] = v * v * d2q2;
    }
  }

  for (int s = 0; s < 16; ++s) {
    const double dSA = d.dA12[s] + d.dA21[s];
    const double dSB = d.dB14[s] + d.dB41[s];
    b.d2Hg[4 * s + 0] = v * (2.0 * g[0] * d.dS24[s] - g[1] * dSA - g[3] * dSB);
    b.d2Hg[4 * s + 1] = v * (2.0 * g[1] * d.dS13[s] - g[0] * dSA + g[2] * dSB);
    b.d2Hg[4 * s + 2] = v * (2.0 * g[2] * d.dS24[s] - g[3] * dSA + g[1] * dSB);
    b.d2Hg[4 * s + 3] = v * (2.0 * g[3] * d.dS13[s] - g[2] * dSA - g[0] * dSB);
  }

  // d^2 Q1 / dg dg
  const double gg[16] = {
      2.0 * f.S24, -SA,         0.0,          -SB,
      -SA,         2.0 * f.S13, SB,           0.0,
      0.0,         SB,          2.0 * f.S24,  -SA,
      -SB,         0.0,         -SA,          2.0 * f.S13,
  };
  for (int k = 0; k < 16; ++k) b.d2gg[k] = v * gg[k];

  return b;
}

Jet2 transform_u_to_v(double u, const Vec4& grad_u, const SymmetricMatrix& Hu) {
  if (u >= 0.0) {
    throw std::domain_error("transform_u_to_v: u >= 0 (transform singular at the boundary)");
  }
  Jet2 jet;
  jet.v = -std::sqrt(-u / 2.0);
  for (int i = 0; i < 4; ++i) jet.grad[i] = -grad_u[i] / (4.0 * jet.v);
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      jet.hess.set(i, j, -(Hu(i, j) + 4.0 * jet.grad[i] * jet.grad[j]) / (4.0 * jet.v));
    }
  }
  return jet;
}

void transform_v_to_u(const Jet2& jet, double& u, Vec4& grad_u, SymmetricMatrix& Hu) {
  u = -2.0 * jet.v * jet.v;
  for (int i = 0; i < 4; ++i) grad_u[i] = -4.0 * jet.v * jet.grad[i];
  Hu = SymmetricMatrix(4);
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      Hu.set(i, j, -4.0 * (jet.v * jet.hess(i, j) + jet.grad[i] * jet.grad[j]));
    }
  }
}

CertificateReport identity_suite(const Jet2& jet) {
  CertificateReport rep;
  rep.subject = "identity_suite";

  const bool diagonal = jet.hess.is_diagonal();
  const FDerivBundle b = F_derivatives(jet);
  const double vFv = jet.v * b.dv;

  if (!diagonal) {
    rep.add_note("3.17", "skipped: hess not diagonal");
  } else {
    double lhs = 0.0;
    double scale = std::fabs(vFv);
    for (int i = 0; i < 4; ++i) {
      const double term = b.H(i, i) * jet.hess(i, i);
      lhs += term;
      scale = std::max(scale, std::fabs(term));
    }
    rep.add("3.17", std::fabs(lhs - vFv) / std::max(scale, 1.0e-300), 1.0e-12);
  }

  const double s13 = jet.hess(0, 0) + jet.hess(2, 2);
  const double s24 = jet.hess(1, 1) + jet.hess(3, 3);
  const double rhs = jet.v * jet.v * s13 * s24 + 1.0;
  const double fscale = std::max({1.0, std::fabs(jet.v * jet.v * s13 * s24), std::fabs(vFv)});
  if (!diagonal) {
    rep.add_note("3.31", "skipped: hess not diagonal");
  } else if (std::fabs(b.F) > 1.0e-12 * fscale) {
    rep.add_note("3.31", "skipped: jet not on-shell");
  } else {
    rep.add("3.31", std::fabs(vFv - rhs) / fscale, 1.0e-12);
  }
  return rep;
}

} // namespace cma::monge
