#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Data-parallel primitives behind the grid solver and the support-function
// geometry. Every kernel has a scalar reference implementation and, where the
// build and the running CPU allow it, a SIMD variant selected at runtime.
//
// The scalar reference mirrors the vector lane structure (four fused
// multiply-add accumulators, fixed reduction order), so all backends return
// bit-identical results. The equivalence tests assert exactly that.

namespace cma::kernels {

enum class Backend { scalar, avx2, neon };

Backend active_backend();
bool backend_available(Backend b);
// Throws std::invalid_argument if the backend is not available on this host.
void set_backend(Backend b);
std::string_view backend_name(Backend b);

double dot(std::span<const double> x, std::span<const double> y);

// y += a * x
void axpy(std::span<double> y, double a, std::span<const double> x);

// w = y + a * x (w may alias y or x)
void waxpy(std::span<double> w, std::span<const double> y, double a,
           std::span<const double> x);

double max_abs(std::span<const double> x);

// y = A x, A in CSR form. row_ptr has n+1 entries.
void spmv_csr(std::span<const int32_t> row_ptr, std::span<const int32_t> cols,
              std::span<const double> vals, std::span<const double> x,
              std::span<double> y);

// min_i (h[i] - x·theta_i) over a structure-of-arrays direction set.
double support_margin(const double x[4], std::span<const double> tx,
                      std::span<const double> ty, std::span<const double> tz,
                      std::span<const double> tw, std::span<const double> h);

// Direct entry points for the backend equivalence tests.
namespace detail {

double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double* y, double a, const double* x, std::size_t n);
void waxpy_scalar(double* w, const double* y, double a, const double* x, std::size_t n);
double max_abs_scalar(const double* x, std::size_t n);
void spmv_csr_scalar(const int32_t* row_ptr, const int32_t* cols, const double* vals,
                     const double* x, double* y, std::size_t nrows);
double support_margin_scalar(const double x[4], const double* tx, const double* ty,
                             const double* tz, const double* tw, const double* h,
                             std::size_t n);

#if defined(CMA_HAVE_AVX2_TU)
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double* y, double a, const double* x, std::size_t n);
void waxpy_avx2(double* w, const double* y, double a, const double* x, std::size_t n);
double max_abs_avx2(const double* x, std::size_t n);
void spmv_csr_avx2(const int32_t* row_ptr, const int32_t* cols, const double* vals,
                   const double* x, double* y, std::size_t nrows);
double support_margin_avx2(const double x[4], const double* tx, const double* ty,
                           const double* tz, const double* tw, const double* h,
                           std::size_t n);
#endif

#if defined(CMA_HAVE_NEON_TU)
double dot_neon(const double* x, const double* y, std::size_t n);
void axpy_neon(double* y, double a, const double* x, std::size_t n);
void waxpy_neon(double* w, const double* y, double a, const double* x, std::size_t n);
double max_abs_neon(const double* x, std::size_t n);
void spmv_csr_neon(const int32_t* row_ptr, const int32_t* cols, const double* vals,
                   const double* x, double* y, std::size_t nrows);
double support_margin_neon(const double x[4], const double* tx, const double* ty,
                           const double* tz, const double* tw, const double* h,
                           std::size_t n);
#endif

} // namespace detail

} // namespace cma::kernels
