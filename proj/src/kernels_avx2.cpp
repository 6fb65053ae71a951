#include "cma/kernels.hpp"

#if defined(CMA_HAVE_AVX2_TU)

#include <immintrin.h>

#include <cmath>
#include <limits>

// AVX2/FMA variants. Full 4-lane blocks run vectorized; tails run through the
// scalar lane update so results stay bit-identical to the reference kernels.

namespace cma::kernels::detail {

namespace {

inline double reduce_lanes(__m256d acc) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

} // namespace

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t j = 0; i < n; ++i, ++j) {
    lane[j] = std::fma(x[i], y[i], lane[j]);
  }
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

void axpy_avx2(double* y, double a, const double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void waxpy_avx2(double* w, const double* y, double a, const double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(w + i, r);
  }
  for (; i < n; ++i) w[i] = std::fma(a, x[i], y[i]);
}

double max_abs_avx2(const double* x, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d mv = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    mv = _mm256_max_pd(mv, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(x + i)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, mv);
  double m = ((lane[0] > lane[2]) ? lane[0] : lane[2]);
  const double m13 = ((lane[1] > lane[3]) ? lane[1] : lane[3]);
  if (m13 > m) m = m13;
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a > m) m = a;
  }
  return m;
}

void spmv_csr_avx2(const int32_t* row_ptr, const int32_t* cols, const double* vals,
                   const double* x, double* y, std::size_t nrows) {
  for (std::size_t r = 0; r < nrows; ++r) {
    const int32_t b = row_ptr[r];
    const int32_t e = row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    int32_t k = b;
    for (; k + 4 <= e; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
      const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), xv, acc);
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (int j = 0; k < e; ++k, ++j) {
      lane[j] = std::fma(vals[k], x[cols[k]], lane[j]);
    }
    y[r] = (lane[0] + lane[2]) + (lane[1] + lane[3]);
  }
}

double support_margin_avx2(const double x[4], const double* tx, const double* ty,
                           const double* tz, const double* tw, const double* h,
                           std::size_t n) {
  const __m256d x0 = _mm256_set1_pd(x[0]);
  const __m256d x1 = _mm256_set1_pd(x[1]);
  const __m256d x2 = _mm256_set1_pd(x[2]);
  const __m256d x3 = _mm256_set1_pd(x[3]);
  __m256d mv = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_mul_pd(x0, _mm256_loadu_pd(tx + i));
    s = _mm256_fmadd_pd(x1, _mm256_loadu_pd(ty + i), s);
    s = _mm256_fmadd_pd(x2, _mm256_loadu_pd(tz + i), s);
    s = _mm256_fmadd_pd(x3, _mm256_loadu_pd(tw + i), s);
    mv = _mm256_min_pd(mv, _mm256_sub_pd(_mm256_loadu_pd(h + i), s));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, mv);
  double m = ((lane[0] < lane[2]) ? lane[0] : lane[2]);
  const double m13 = ((lane[1] < lane[3]) ? lane[1] : lane[3]);
  if (m13 < m) m = m13;
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

#endif // CMA_HAVE_AVX2_TU
