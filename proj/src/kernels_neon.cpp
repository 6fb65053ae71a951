#include "cma/kernels.hpp"

#if defined(CMA_HAVE_NEON_TU)

#include <arm_neon.h>

#include <cmath>
#include <limits>

// NEON variants. Lanes {0,1} and {2,3} of the reference layout map onto two
// float64x2 accumulators; the reduction (l0+l2)+(l1+l3) is preserved.

namespace cma::kernels::detail {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t a01 = vdupq_n_f64(0.0);
  float64x2_t a23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a01 = vfmaq_f64(a01, vld1q_f64(x + i), vld1q_f64(y + i));
    a23 = vfmaq_f64(a23, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double lane[4] = {vgetq_lane_f64(a01, 0), vgetq_lane_f64(a01, 1),
                    vgetq_lane_f64(a23, 0), vgetq_lane_f64(a23, 1)};
  for (std::size_t j = 0; i < n; ++i, ++j) {
    lane[j] = std::fma(x[i], y[i], lane[j]);
  }
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

void axpy_neon(double* y, double a, const double* x, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void waxpy_neon(double* w, const double* y, double a, const double* x, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(w + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) w[i] = std::fma(a, x[i], y[i]);
}

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t mv = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    mv = vmaxq_f64(mv, vabsq_f64(vld1q_f64(x + i)));
  }
  double m = vgetq_lane_f64(mv, 0);
  const double m1 = vgetq_lane_f64(mv, 1);
  if (m1 > m) m = m1;
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a > m) m = a;
  }
  return m;
}

void spmv_csr_neon(const int32_t* row_ptr, const int32_t* cols, const double* vals,
                   const double* x, double* y, std::size_t nrows) {
  for (std::size_t r = 0; r < nrows; ++r) {
    const int32_t b = row_ptr[r];
    const int32_t e = row_ptr[r + 1];
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    int32_t k = b;
    for (; k + 4 <= e; k += 4) {
      lane[0] = std::fma(vals[k + 0], x[cols[k + 0]], lane[0]);
      lane[1] = std::fma(vals[k + 1], x[cols[k + 1]], lane[1]);
      lane[2] = std::fma(vals[k + 2], x[cols[k + 2]], lane[2]);
      lane[3] = std::fma(vals[k + 3], x[cols[k + 3]], lane[3]);
    }
    for (int j = 0; k < e; ++k, ++j) {
      lane[j] = std::fma(vals[k], x[cols[k]], lane[j]);
    }
    y[r] = (lane[0] + lane[2]) + (lane[1] + lane[3]);
  }
}

double support_margin_neon(const double x[4], const double* tx, const double* ty,
                           const double* tz, const double* tw, const double* h,
                           std::size_t n) {
  const float64x2_t x0 = vdupq_n_f64(x[0]);
  const float64x2_t x1 = vdupq_n_f64(x[1]);
  const float64x2_t x2 = vdupq_n_f64(x[2]);
  const float64x2_t x3 = vdupq_n_f64(x[3]);
  float64x2_t mv = vdupq_n_f64(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t s = vmulq_f64(x0, vld1q_f64(tx + i));
    s = vfmaq_f64(s, x1, vld1q_f64(ty + i));
    s = vfmaq_f64(s, x2, vld1q_f64(tz + i));
    s = vfmaq_f64(s, x3, vld1q_f64(tw + i));
    mv = vminq_f64(mv, vsubq_f64(vld1q_f64(h + i), s));
  }
  double m = vgetq_lane_f64(mv, 0);
  const double m1 = vgetq_lane_f64(mv, 1);
  if (m1 < m) m = m1;
  for (; i < n; ++i) {
    double s = x[0] * tx[i];
    s = std::fma(x[1], ty[i], s);
    s = std::fma(x[2], tz[i], s);
    s = std::fma(x[3], tw[i], s);
    const double v = h[i] - s;
    if (v < m) m = v;
  }
  return m;
}

} // namespace cma::kernels::detail

#endif // CMA_HAVE_NEON_TU
