#pragma once

#include <array>

#include "cma/matrix.hpp"
#include "cma/report.hpp"

// Real form of the complex Monge-Ampere operator on R^4: the complexification
// maps, the transformed operator
//
//   F = v^2 [(v11+v33)(v22+v44) - (v12+v34)(v21+v43) - (v14-v32)(v41-v23)]
//     + v  [(v2^2+v4^2)(v11+v33) + (v1^2+v3^2)(v22+v44)
//           - (v1 v2 + v3 v4)(v12+v34+v21+v43)
//           - (v1 v4 - v2 v3)(v14-v32+v41-v23)] - 1,
//
// every first and second partial derivative of F in closed form, and the
// exact on-shell identities. Index convention (1,2,3,4) = (x1, x2, y1, y2).

namespace cma::monge {

using cma::Vec4;
using HessSlots = std::array<double, 16>;  // independent 4x4 slots, entry 4*i+j

/// Pointwise second-order state of the transformed unknown v = -sqrt(-u/2).
struct Jet2 {
  double v = 0.0;
  Vec4 grad{};
  SymmetricMatrix hess{4};
};

/// The 2x2 Hermitian complex Hessian packed as four reals.
struct ComplexHessian {
  double u11;     // u_{1 1bar}
  double u22;     // u_{2 2bar}
  double re_u12;  // Re u_{1 2bar}
  double im_u12;  // Im u_{1 2bar}

  double det() const { return u11 * u22 - re_u12 * re_u12 - im_u12 * im_u12; }
};

/// All partials of F at one jet, with the 16 Hessian slots treated as
/// independent variables (so F^{12} and F^{21} are separate slots that agree
/// in value on symmetric input).
struct FDerivBundle {
  double F = 0.0;
  HessSlots dH{};                   // F^{ij}
  Vec4 dg{};                        // F^{v_k}
  double dv = 0.0;                  // F^v
  std::array<double, 256> d2HH{};   // F^{ij,kl} at 16*(4i+j) + (4k+l)
  std::array<double, 64> d2Hg{};    // F^{ij,v_k} at 4*(4i+j) + k
  HessSlots d2Hv{};                 // F^{ij,v}
  std::array<double, 16> d2gg{};    // F^{v_k,v_l} at 4k+l
  Vec4 d2gv{};                      // F^{v_k,v}
  double d2vv = 0.0;                // F^{v,v}

  double H(int i, int j) const { return dH[4 * i + j]; }
  double HH(int i, int j, int k, int l) const { return d2HH[16 * (4 * i + j) + 4 * k + l]; }
  double Hg(int i, int j, int k) const { return d2Hg[4 * (4 * i + j) + k]; }
  double Hv(int i, int j) const { return d2Hv[4 * i + j]; }
  double gg(int k, int l) const { return d2gg[4 * k + l]; }
};

/// (2.4) applied to a real symmetric Hessian of u:
/// u_{11bar} = (u11+u33)/4, u_{22bar} = (u22+u44)/4,
/// Re u_{12bar} = (u12+u34)/4, Im u_{12bar} = (u14-u32)/4.
ComplexHessian real_to_complex_hessian(const SymmetricMatrix& Hu);

/// Left side of (u11+u33)(u22+u44) - (u12+u34)(u21+u43) - (u14-u32)(u41-u23)
/// minus 16*psi.
double ma_residual_u(const SymmetricMatrix& Hu, double psi = 1.0);

double F_eval(const Jet2& jet);

/// F with the Hessian slots independent; the finite-difference surface.
double F_eval_raw(double v, const Vec4& grad, const HessSlots& H);

FDerivBundle F_derivatives(const Jet2& jet);

/// v = -sqrt(-u/2), v_i = -u_i/(4v), v_ij = -(u_ij + 4 v_i v_j)/(4v).
/// Throws std::domain_error for u >= 0.
Jet2 transform_u_to_v(double u, const Vec4& grad_u, const SymmetricMatrix& Hu);

/// Forward chain rule u = -2v^2, u_i = -4 v v_i, u_ij = -4(v v_ij + v_i v_j).
void transform_v_to_u(const Jet2& jet, double& u, Vec4& grad_u, SymmetricMatrix& Hu);

/// Residuals of the on-shell identities, relative to the largest term:
///  "3.17": F^11 v11 + F^22 v22 + F^33 v33 + F^44 v44 = v F^v   (diagonal jets)
///  "3.31": v F^v = v^2 (v11+v33)(v22+v44) + 1                  (on-shell diagonal jets)
/// Precondition violations are recorded per identity, not thrown.
CertificateReport identity_suite(const Jet2& jet);

} // namespace cma::monge
