#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "cma/kernels.hpp"

using namespace cma::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                               double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

} // namespace

TEST_CASE("scalar dot matches naive high-precision reference") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 16u, 1000u, 4097u}) {
    auto x = random_vec(rng, n);
    auto y = random_vec(rng, n);
    long double ref = 0.0L;
    for (std::size_t i = 0; i < n; ++i) ref += (long double)x[i] * y[i];
    const double got = detail::dot_scalar(x.data(), y.data(), n);
    CHECK(got == doctest::Approx((double)ref).epsilon(1e-12));
  }
}

#if defined(CMA_HAVE_AVX2_TU)
TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
  if (!backend_available(Backend::avx2)) {
    MESSAGE("avx2 not available on this host; skipping");
    return;
  }
  std::mt19937_64 rng(11);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u, 13u, 64u, 1001u, 4096u}) {
    auto x = random_vec(rng, n, -3.0, 3.0);
    auto y = random_vec(rng, n, -3.0, 3.0);

    CHECK(detail::dot_scalar(x.data(), y.data(), n) ==
          detail::dot_avx2(x.data(), y.data(), n));
    CHECK(detail::max_abs_scalar(x.data(), n) == detail::max_abs_avx2(x.data(), n));

    auto ys = y;
    auto yv = y;
    detail::axpy_scalar(ys.data(), 0.37, x.data(), n);
    detail::axpy_avx2(yv.data(), 0.37, x.data(), n);
    CHECK(std::memcmp(ys.data(), yv.data(), n * sizeof(double)) == 0);

    std::vector<double> ws(n), wv(n);
    detail::waxpy_scalar(ws.data(), y.data(), -1.91, x.data(), n);
    detail::waxpy_avx2(wv.data(), y.data(), -1.91, x.data(), n);
    CHECK(std::memcmp(ws.data(), wv.data(), n * sizeof(double)) == 0);
  }
}

TEST_CASE("avx2 spmv and support margin are bit-identical to scalar") {
  if (!backend_available(Backend::avx2)) {
    MESSAGE("avx2 not available on this host; skipping");
    return;
  }
  std::mt19937_64 rng(23);
  const int nrows = 157;
  std::vector<int32_t> row_ptr(nrows + 1, 0);
  std::vector<int32_t> cols;
  std::vector<double> vals;
  std::uniform_int_distribution<int> rowlen(0, 37);
  std::uniform_int_distribution<int32_t> colpick(0, nrows - 1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int r = 0; r < nrows; ++r) {
    const int len = rowlen(rng);
    for (int k = 0; k < len; ++k) {
      cols.push_back(colpick(rng));
      vals.push_back(u(rng));
    }
    row_ptr[r + 1] = static_cast<int32_t>(cols.size());
  }
  auto x = random_vec(rng, nrows);
  std::vector<double> ys(nrows), yv(nrows);
  detail::spmv_csr_scalar(row_ptr.data(), cols.data(), vals.data(), x.data(), ys.data(),
                          nrows);
  detail::spmv_csr_avx2(row_ptr.data(), cols.data(), vals.data(), x.data(), yv.data(),
                        nrows);
  CHECK(std::memcmp(ys.data(), yv.data(), nrows * sizeof(double)) == 0);

  for (std::size_t n : {1u, 5u, 4096u}) {
    auto tx = random_vec(rng, n);
    auto ty = random_vec(rng, n);
    auto tz = random_vec(rng, n);
    auto tw = random_vec(rng, n);
    auto h = random_vec(rng, n, 0.5, 2.0);
    const double p[4] = {u(rng), u(rng), u(rng), u(rng)};
    CHECK(detail::support_margin_scalar(p, tx.data(), ty.data(), tz.data(), tw.data(),
                                        h.data(), n) ==
          detail::support_margin_avx2(p, tx.data(), ty.data(), tz.data(), tw.data(),
                                      h.data(), n));
  }
}
#endif

TEST_CASE("dispatch honors set_backend and stays callable") {
  std::mt19937_64 rng(3);
  auto x = random_vec(rng, 1000);
  auto y = random_vec(rng, 1000);

  set_backend(Backend::scalar);
  const double d_scalar = dot(x, y);
  CHECK(active_backend() == Backend::scalar);

  if (backend_available(Backend::avx2)) {
    set_backend(Backend::avx2);
    CHECK(dot(x, y) == d_scalar);
  }
  if (!backend_available(Backend::neon)) {
    CHECK_THROWS_AS(set_backend(Backend::neon), std::invalid_argument);
  }
  set_backend(Backend::scalar);
}
