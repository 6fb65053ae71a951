#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cma/monge_ampere.hpp"

using namespace cma;
using namespace cma::monge;

namespace {

Jet2 make_jet(double v, const Vec4& g, std::initializer_list<double> diag) {
  Jet2 jet;
  jet.v = v;
  jet.grad = g;
  int i = 0;
  for (double d : diag) jet.hess.set(i, i, d), ++i;
  return jet;
}

Jet2 random_jet(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uv(-3.0, -0.2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Jet2 jet;
  jet.v = uv(rng);
  for (auto& x : jet.grad) x = u(rng);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) jet.hess.set(i, j, u(rng));
  return jet;
}

HessSlots slots_of(const SymmetricMatrix& H) {
  HessSlots s{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s[4 * i + j] = H(i, j);
  return s;
}

} // namespace

TEST_CASE("real_to_complex_hessian examples") {
  {
    SymmetricMatrix Hu = SymmetricMatrix::identity(4);
    for (int i = 0; i < 4; ++i) Hu.set(i, i, 2.0);
    const auto c = real_to_complex_hessian(Hu);
    CHECK(c.u11 == doctest::Approx(1.0));
    CHECK(c.u22 == doctest::Approx(1.0));
    CHECK(c.re_u12 == 0.0);
    CHECK(c.im_u12 == 0.0);
    CHECK(c.det() == doctest::Approx(1.0));
  }
  {
    const auto c = real_to_complex_hessian(SymmetricMatrix(4));
    CHECK(c.u11 == 0.0);
    CHECK(c.u22 == 0.0);
    CHECK(c.re_u12 == 0.0);
    CHECK(c.im_u12 == 0.0);
  }
  {
    const double d[] = {4, 0, 0, 0};
    const auto c = real_to_complex_hessian(SymmetricMatrix::diagonal(d));
    CHECK(c.u11 == doctest::Approx(1.0));
    CHECK(c.u22 == 0.0);
    CHECK(c.re_u12 == 0.0);
    CHECK(c.im_u12 == 0.0);
  }
}

TEST_CASE("ma_residual_u examples and complex-determinant consistency") {
  {
    SymmetricMatrix Hu(4);
    for (int i = 0; i < 4; ++i) Hu.set(i, i, 2.0);
    CHECK(ma_residual_u(Hu) == doctest::Approx(0.0));
  }
  {
    // quadratic ansatz: diag(2c) with (c1+c3)(c2+c4) = 4
    const double c[] = {1.5, 1.0, 0.5, 1.0};
    SymmetricMatrix Hu(4);
    for (int i = 0; i < 4; ++i) Hu.set(i, i, 2.0 * c[i]);
    CHECK(ma_residual_u(Hu) == doctest::Approx(0.0));
  }
  CHECK(ma_residual_u(SymmetricMatrix(4)) == doctest::Approx(-16.0));

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    SymmetricMatrix Hu(4);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) Hu.set(i, j, u(rng));
    const double psi = 0.25 + 0.5 * (trial % 3);
    const double det16 = 16.0 * real_to_complex_hessian(Hu).det();
    CHECK(det16 == doctest::Approx(ma_residual_u(Hu, psi) + 16.0 * psi).epsilon(1e-12));
  }
}

TEST_CASE("F_eval examples") {
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::fabs(F_eval(make_jet(-s, {0, 0, 0, 0}, {s, s, s, s}))) <= 1e-14);
  CHECK(F_eval(make_jet(-1, {0, 0, 0, 0}, {2, 0.5, 0, 0})) == doctest::Approx(0.0));
  CHECK(F_eval(make_jet(-1, {0, 0, 0, 0}, {0, 0, 0, 0})) == doctest::Approx(-1.0));
}

TEST_CASE("F_derivatives closed-form spot values") {
  const auto b = F_derivatives(make_jet(-1, {0, 0, 0, 0}, {2, 0.5, 0, 0}));
  CHECK(b.H(0, 0) == doctest::Approx(0.5));
  CHECK(b.H(1, 1) == doctest::Approx(2.0));
  CHECK(b.H(0, 1) == 0.0);
  CHECK(b.dv == doctest::Approx(-2.0));
  CHECK(b.HH(0, 0, 1, 1) == doctest::Approx(1.0));  // F^{11,22} = v^2
  CHECK(b.H(1, 2) == 0.0);                          // F^{23} = 0 at zero gradient

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Jet2 jet = random_jet(rng);
    const auto bb = F_derivatives(jet);
    const double v2 = jet.v * jet.v;
    CHECK(bb.HH(0, 0, 1, 1) == doctest::Approx(v2));
    CHECK(bb.HH(0, 1, 1, 0) == doctest::Approx(-v2));
    // (F^{ij}) structure of the symmetric-input matrix
    CHECK(bb.H(0, 2) == 0.0);
    CHECK(bb.H(2, 0) == 0.0);
    CHECK(bb.H(1, 3) == 0.0);
    CHECK(bb.H(3, 1) == 0.0);
    CHECK(bb.H(2, 2) == doctest::Approx(bb.H(0, 0)));
    CHECK(bb.H(3, 3) == doctest::Approx(bb.H(1, 1)));
    CHECK(bb.H(0, 3) == doctest::Approx(-bb.H(1, 2)));
    CHECK(bb.H(0, 1) == doctest::Approx(bb.H(2, 3)));
  }
}

TEST_CASE("F_derivatives matches central finite differences in every direction") {
  std::mt19937_64 rng(19);
  const double step = 1e-5;
  for (int trial = 0; trial < 40; ++trial) {
    const Jet2 jet = random_jet(rng);
    const auto b = F_derivatives(jet);
    const HessSlots H0 = slots_of(jet.hess);

    auto eval = [&](double dv_, int gslot, double dg_, int hslot, double dh_) {
      Vec4 g = jet.grad;
      if (gslot >= 0) g[gslot] += dg_;
      HessSlots H = H0;
      if (hslot >= 0) H[hslot] += dh_;
      return F_eval_raw(jet.v + dv_, g, H);
    };

    auto close = [](double a, double bb) {
      return std::fabs(a - bb) <= 1e-6 * std::max({1.0, std::fabs(a), std::fabs(bb)});
    };
    // second differences carry a rounding floor of ~|F| eps / step^2, so
    // they run at a larger step; F is quadratic in each argument block, so
    // the truncation stays negligible.
    const double step2 = 1e-4;
    auto close2 = [](double a, double bb) {
      return std::fabs(a - bb) <= 5e-5 * std::max({1.0, std::fabs(a), std::fabs(bb)});
    };

    for (int s = 0; s < 16; ++s) {
      const double fd = (eval(0, -1, 0, s, step) - eval(0, -1, 0, s, -step)) / (2 * step);
      CHECK(close(fd, b.dH[s]));
    }
    for (int k = 0; k < 4; ++k) {
      const double fd = (eval(0, k, step, -1, 0) - eval(0, k, -step, -1, 0)) / (2 * step);
      CHECK(close(fd, b.dg[k]));
    }
    {
      const double fd = (eval(step, -1, 0, -1, 0) - eval(-step, -1, 0, -1, 0)) / (2 * step);
      CHECK(close(fd, b.dv));
    }

    // second partials: a sampled set of direction pairs per trial
    for (int rep = 0; rep < 24; ++rep) {
      const int s = static_cast<int>(rng() % 16);
      const int r = static_cast<int>(rng() % 16);
      HessSlots Hpp = H0, Hpm = H0, Hmp = H0, Hmm = H0;
      Hpp[s] += step2; Hpp[r] += step2;
      Hpm[s] += step2; Hpm[r] -= step2;
      Hmp[s] -= step2; Hmp[r] += step2;
      Hmm[s] -= step2; Hmm[r] -= step2;
      const double fd = (F_eval_raw(jet.v, jet.grad, Hpp) - F_eval_raw(jet.v, jet.grad, Hpm) -
                         F_eval_raw(jet.v, jet.grad, Hmp) + F_eval_raw(jet.v, jet.grad, Hmm)) /
                        (4 * step2 * step2);
      CHECK(close2(fd, b.d2HH[16 * s + r]));
    }
    for (int rep = 0; rep < 12; ++rep) {
      const int s = static_cast<int>(rng() % 16);
      const int k = static_cast<int>(rng() % 4);
      const double fd =
          ((eval(0, k, step2, s, step2) - eval(0, k, step2, s, -step2)) -
           (eval(0, k, -step2, s, step2) - eval(0, k, -step2, s, -step2))) /
          (4 * step2 * step2);
      CHECK(close2(fd, b.Hg(s / 4, s % 4, k)));
    }
    for (int s = 0; s < 16; ++s) {
      const double fd = ((eval(step2, -1, 0, s, step2) - eval(step2, -1, 0, s, -step2)) -
                         (eval(-step2, -1, 0, s, step2) - eval(-step2, -1, 0, s, -step2))) /
                        (4 * step2 * step2);
      CHECK(close2(fd, b.d2Hv[s]));
    }
    for (int rep = 0; rep < 8; ++rep) {
      const int k = static_cast<int>(rng() % 4);
      const int l = static_cast<int>(rng() % 4);
      Vec4 gpp = jet.grad, gpm = jet.grad, gmp = jet.grad, gmm = jet.grad;
      gpp[k] += step2; gpp[l] += step2;
      gpm[k] += step2; gpm[l] -= step2;
      gmp[k] -= step2; gmp[l] += step2;
      gmm[k] -= step2; gmm[l] -= step2;
      const double fd = (F_eval_raw(jet.v, gpp, H0) - F_eval_raw(jet.v, gpm, H0) -
                         F_eval_raw(jet.v, gmp, H0) + F_eval_raw(jet.v, gmm, H0)) /
                        (4 * step2 * step2);
      CHECK(close2(fd, b.gg(k, l)));
    }
    for (int k = 0; k < 4; ++k) {
      const double fd = ((eval(step, k, step, -1, 0) - eval(step, k, -step, -1, 0)) -
                         (eval(-step, k, step, -1, 0) - eval(-step, k, -step, -1, 0))) /
                        (4 * step * step);
      CHECK(close2(fd, b.d2gv[k]));
    }
    {
      const double fd = (eval(step2, -1, 0, -1, 0) - 2.0 * b.F + eval(-step2, -1, 0, -1, 0)) /
                        (step2 * step2);
      CHECK(std::fabs(fd - b.d2vv) <= 1e-4 * std::max({1.0, std::fabs(fd)}));
    }
  }
}

TEST_CASE("transform_u_to_v examples and round trip") {
  {
    const auto jet = transform_u_to_v(-2.0, {0, 0, 0, 0}, SymmetricMatrix(4));
    CHECK(jet.v == doctest::Approx(-1.0));
    for (double g : jet.grad) CHECK(g == 0.0);
    CHECK(jet.hess.max_abs() == 0.0);
  }
  {
    SymmetricMatrix Hu(4);
    for (int i = 0; i < 4; ++i) Hu.set(i, i, 2.0);
    const auto jet = transform_u_to_v(-1.0, {0, 0, 0, 0}, Hu);
    CHECK(jet.v == doctest::Approx(-1.0 / std::sqrt(2.0)));
    for (int i = 0; i < 4; ++i)
      CHECK(jet.hess(i, i) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(transform_u_to_v(0.0, {0, 0, 0, 0}, SymmetricMatrix(4)),
                  std::domain_error);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> uu(-3.0, -0.1);
  for (int trial = 0; trial < 100; ++trial) {
    const double u0 = uu(rng);
    Vec4 gu{u(rng), u(rng), u(rng), u(rng)};
    SymmetricMatrix Hu(4);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) Hu.set(i, j, u(rng));

    const Jet2 jet = transform_u_to_v(u0, gu, Hu);
    double u_back;
    Vec4 gu_back;
    SymmetricMatrix Hu_back(4);
    transform_v_to_u(jet, u_back, gu_back, Hu_back);
    CHECK(u_back == doctest::Approx(u0).epsilon(1e-12));
    for (int i = 0; i < 4; ++i) CHECK(gu_back[i] == doctest::Approx(gu[i]).epsilon(1e-12));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(std::fabs(Hu_back(i, j) - Hu(i, j)) <= 1e-12 * std::max(1.0, Hu.max_abs()));

    // derivation of the transformed operator from the u-form equation
    CHECK(F_eval(jet) == doctest::Approx(ma_residual_u(Hu, 1.0) / 16.0).epsilon(1e-12));
  }
}

TEST_CASE("identity_suite examples") {
  {
    const auto rep = identity_suite(make_jet(-1, {0, 0, 0, 0}, {2, 0.5, 0, 0}));
    CHECK(rep.passed);
    CHECK(rep.residual("3.17") <= 1e-12);
    CHECK(rep.residual("3.31") <= 1e-12);
  }
  {
    // any diagonal jet with random gradient satisfies 3.17
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      Jet2 jet = make_jet(-1.3, {u(rng), u(rng), u(rng), u(rng)},
                          {std::fabs(u(rng)) + 0.1, std::fabs(u(rng)) + 0.1,
                           std::fabs(u(rng)), std::fabs(u(rng))});
      const auto rep = identity_suite(jet);
      CHECK(rep.residual("3.17") <= 1e-12);
    }
  }
  {
    // zero Hessian, zero gradient: both sides of 3.17 vanish
    const auto rep = identity_suite(make_jet(-1, {0, 0, 0, 0}, {0, 0, 0, 0}));
    CHECK(rep.residual("3.17") <= 1e-12);
    // off-shell, so 3.31 is reported skipped rather than failed
    CHECK(rep.find("3.31")->verdict == "skipped: jet not on-shell");
    CHECK(rep.passed);
  }
  {
    // non-diagonal jet: both identities report the precondition
    Jet2 jet = make_jet(-1, {0, 0, 0, 0}, {1, 1, 1, 1});
    jet.hess.set(0, 1, 0.3);
    const auto rep = identity_suite(jet);
    CHECK(rep.find("3.17")->verdict == "skipped: hess not diagonal");
    CHECK(rep.passed);
  }
}
