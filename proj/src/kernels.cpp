#include "cma/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace cma::kernels {

namespace {

struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double*, double, const double*, std::size_t);
  void (*waxpy)(double*, const double*, double, const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  void (*spmv)(const int32_t*, const int32_t*, const double*, const double*, double*,
               std::size_t);
  double (*margin)(const double[4], const double*, const double*, const double*,
                   const double*, const double*, std::size_t);
};

constexpr Vtable kScalar = {
    detail::dot_scalar,    detail::axpy_scalar, detail::waxpy_scalar,
    detail::max_abs_scalar, detail::spmv_csr_scalar, detail::support_margin_scalar,
};

#if defined(CMA_HAVE_AVX2_TU)
constexpr Vtable kAvx2 = {
    detail::dot_avx2,    detail::axpy_avx2, detail::waxpy_avx2,
    detail::max_abs_avx2, detail::spmv_csr_avx2, detail::support_margin_avx2,
};
#endif

#if defined(CMA_HAVE_NEON_TU)
constexpr Vtable kNeon = {
    detail::dot_neon,    detail::axpy_neon, detail::waxpy_neon,
    detail::max_abs_neon, detail::spmv_csr_neon, detail::support_margin_neon,
};
#endif

bool host_supports(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(CMA_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(CMA_HAVE_NEON_TU)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Vtable* table_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &kScalar;
    case Backend::avx2:
#if defined(CMA_HAVE_AVX2_TU)
      return &kAvx2;
#else
      break;
#endif
    case Backend::neon:
#if defined(CMA_HAVE_NEON_TU)
      return &kNeon;
#else
      break;
#endif
  }
  return &kScalar;
}

Backend pick_default() {
  if (const char* env = std::getenv("CMA_KERNEL_BACKEND")) {
    const std::string s(env);
    if (s == "scalar") return Backend::scalar;
    if (s == "avx2" && host_supports(Backend::avx2)) return Backend::avx2;
    if (s == "neon" && host_supports(Backend::neon)) return Backend::neon;
  }
  if (host_supports(Backend::avx2)) return Backend::avx2;
  if (host_supports(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

struct State {
  Backend backend;
  const Vtable* vt;
  State() : backend(pick_default()), vt(table_for(backend)) {}
};

State& state() {
  static State s;
  return s;
}

} // namespace

Backend active_backend() { return state().backend; }

bool backend_available(Backend b) { return host_supports(b); }

void set_backend(Backend b) {
  if (!host_supports(b)) {
    throw std::invalid_argument("kernel backend not available on this host: " +
                                std::string(backend_name(b)));
  }
  state().backend = b;
  state().vt = table_for(b);
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

double dot(std::span<const double> x, std::span<const double> y) {
  return state().vt->dot(x.data(), y.data(), x.size());
}

void axpy(std::span<double> y, double a, std::span<const double> x) {
  state().vt->axpy(y.data(), a, x.data(), y.size());
}

void waxpy(std::span<double> w, std::span<const double> y, double a,
           std::span<const double> x) {
  state().vt->waxpy(w.data(), y.data(), a, x.data(), w.size());
}

double max_abs(std::span<const double> x) {
  return state().vt->max_abs(x.data(), x.size());
}

void spmv_csr(std::span<const int32_t> row_ptr, std::span<const int32_t> cols,
              std::span<const double> vals, std::span<const double> x,
              std::span<double> y) {
  state().vt->spmv(row_ptr.data(), cols.data(), vals.data(), x.data(), y.data(),
                   row_ptr.size() - 1);
}

double support_margin(const double x[4], std::span<const double> tx,
                      std::span<const double> ty, std::span<const double> tz,
                      std::span<const double> tw, std::span<const double> h) {
  return state().vt->margin(x, tx.data(), ty.data(), tz.data(), tw.data(), h.data(),
                            h.size());
}

} // namespace cma::kernels
