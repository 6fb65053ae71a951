#include "cma/kernels.hpp"

#include <cmath>

// Reference kernels. The four-lane accumulator layout and the final reduction
// order (lane0+lane2) + (lane1+lane3) are the contract every SIMD variant
// must reproduce bit for bit.

namespace cma::kernels::detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] = std::fma(x[i + 0], y[i + 0], acc[0]);
    acc[1] = std::fma(x[i + 1], y[i + 1], acc[1]);
    acc[2] = std::fma(x[i + 2], y[i + 2], acc[2]);
    acc[3] = std::fma(x[i + 3], y[i + 3], acc[3]);
  }
  for (std::size_t j = 0; i < n; ++i, ++j) {
    acc[j] = std::fma(x[i], y[i], acc[j]);
  }
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void waxpy_scalar(double* w, const double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) w[i] = std::fma(a, x[i], y[i]);
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a > m) m = a;
  }
  return m;
}

void spmv_csr_scalar(const int32_t* row_ptr, const int32_t* cols, const double* vals,
                     const double* x, double* y, std::size_t nrows) {
  for (std::size_t r = 0; r < nrows; ++r) {
    const int32_t b = row_ptr[r];
    const int32_t e = row_ptr[r + 1];
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    int32_t k = b;
    for (; k + 4 <= e; k += 4) {
      acc[0] = std::fma(vals[k + 0], x[cols[k + 0]], acc[0]);
      acc[1] = std::fma(vals[k + 1], x[cols[k + 1]], acc[1]);
      acc[2] = std::fma(vals[k + 2], x[cols[k + 2]], acc[2]);
      acc[3] = std::fma(vals[k + 3], x[cols[k + 3]], acc[3]);
    }
    for (int j = 0; k < e; ++k, ++j) {
      acc[j] = std::fma(vals[k], x[cols[k]], acc[j]);
    }
    y[r] = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  }
}

double support_margin_scalar(const double x[4], const double* tx, const double* ty,
                             const double* tz, const double* tw, const double* h,
                             std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
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
