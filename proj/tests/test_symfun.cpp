#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cma/symfun.hpp"

using namespace cma;
using namespace cma::symfun;

namespace {

// Brute-force subset-sum oracle for sigma_k of a spectrum (n <= 6 in tests).
double sigma_brute(const std::vector<double>& lam, int k) {
  const int n = static_cast<int>(lam.size());
  if (k < 0 || k > n) return 0.0;
  if (k == 0) return 1.0;
  double total = 0.0;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    double prod = 1.0;
    for (int i : idx) prod *= lam[i];
    total += prod;
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return total;
}

// Polynomial extension of sigma_k to arbitrary (possibly nonsymmetric)
// matrices: sum of principal k x k minors. This is the surface the
// Lemma 2.1 derivative formulas differentiate, so finite differences of it
// are the oracle for sigma_gradient / sigma_hessian / q derivatives.
double sigma_matrix(const std::vector<double>& m, int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k == 0) return 1.0;
  double total = 0.0;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    // determinant of the k x k principal minor by Laplace-free LU (k <= 6)
    std::vector<double> sub(static_cast<std::size_t>(k) * k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) sub[static_cast<std::size_t>(r) * k + c] = m[static_cast<std::size_t>(idx[r]) * n + idx[c]];
    total += determinant_lu(sub, k);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return total;
}

double q_matrix(const std::vector<double>& m, int n, int l) {
  const double d = sigma_matrix(m, n, l + 1);
  if (d <= 0.0) return 0.0;
  return sigma_matrix(m, n, l + 2) / d;
}

} // namespace

TEST_CASE("sigma_k spec examples and conventions") {
  std::vector<double> lam = {1, 2, 3, 4};
  CHECK(sigma_k(lam, 0) == 1.0);
  CHECK(sigma_k(lam, 2) == doctest::Approx(35.0));  // brute-force over 2-subsets
  CHECK(sigma_brute(lam, 2) == doctest::Approx(35.0));

  std::vector<double> two = {5, 7};
  CHECK(sigma_k(two, 3) == 0.0);  // sigma_{n+1} = 0
  CHECK(sigma_k(two, -1) == 0.0);

  CHECK_THROWS_AS(sigma_k(two, 4), std::invalid_argument);
  CHECK_THROWS_AS(sigma_k(two, -2), std::invalid_argument);
  CHECK_THROWS_AS(sigma_k(std::vector<double>{}, 0), std::invalid_argument);
}

TEST_CASE("sigma_k equals the brute-force subset sum and is permutation symmetric") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<double> lam(n);
    for (auto& x : lam) x = u(rng);
    for (int k = 0; k <= n; ++k) {
      const double a = sigma_k(lam, k);
      const double b = sigma_brute(lam, k);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
    auto perm = lam;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int k = 0; k <= n; ++k) {
      CHECK(sigma_k(lam, k) == doctest::Approx(sigma_k(perm, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sigma_k_excluding") {
  std::vector<double> lam3 = {1, 2, 3};
  const int e0[] = {0};
  CHECK(sigma_k_excluding(lam3, 2, e0) == doctest::Approx(6.0));  // brute on (0,2,3)
  const int e12[] = {1, 2};
  CHECK(sigma_k_excluding(lam3, 1, e12) == doctest::Approx(1.0));
  std::vector<double> lam4 = {1, 2, 3, 4};
  CHECK(sigma_k_excluding(lam4, 0, e0) == 1.0);

  const int bad[] = {7};
  CHECK_THROWS_AS(sigma_k_excluding(lam3, 1, bad), std::invalid_argument);
  const int dup[] = {1, 1};
  CHECK_THROWS_AS(sigma_k_excluding(lam3, 1, dup), std::invalid_argument);
}

TEST_CASE("sigma_gradient examples") {
  {
    const double d[] = {1, 2, 3, 4};
    auto g = sigma_gradient(SymmetricMatrix::diagonal(d), 4);
    CHECK(g(0, 0) == doctest::Approx(24.0));
    CHECK(g(1, 1) == doctest::Approx(12.0));
    CHECK(g(2, 2) == doctest::Approx(8.0));
    CHECK(g(3, 3) == doctest::Approx(6.0));
    CHECK(g(0, 1) == 0.0);
  }
  {
    const double d[] = {1, 1, 1, 1};
    auto g = sigma_gradient(SymmetricMatrix::diagonal(d), 1);
    for (int i = 0; i < 4; ++i) CHECK(g(i, i) == 1.0);
  }
  {
    const double d[] = {2, 0, 0, 0};
    auto g = sigma_gradient(SymmetricMatrix::diagonal(d), 2);
    CHECK(g(0, 0) == doctest::Approx(0.0));
    CHECK(g(1, 1) == doctest::Approx(2.0));
    CHECK(g(2, 2) == doctest::Approx(2.0));
    CHECK(g(3, 3) == doctest::Approx(2.0));
  }
  SymmetricMatrix off(3);
  off.set(0, 0, 1.0);
  off.set(0, 1, 0.5);
  CHECK_THROWS_AS(sigma_gradient(off, 2), std::invalid_argument);
}

TEST_CASE("sigma_hessian examples") {
  const double d[] = {1, 2, 3};
  const auto H = SymmetricMatrix::diagonal(d);
  auto t2 = sigma_hessian(H, 2);
  CHECK(t2.at(0, 0, 1, 1) == doctest::Approx(1.0));  // sigma_0 = 1
  auto t3 = sigma_hessian(H, 3);
  CHECK(t3.at(0, 0, 1, 1) == doctest::Approx(3.0));   // sigma_1 of (0,0,3)
  CHECK(t3.at(0, 1, 1, 0) == doctest::Approx(-3.0));  // antisymmetric slot
  CHECK(t3.at(0, 1, 0, 1) == 0.0);
}

TEST_CASE("sigma derivatives match central finite differences of the minor polynomial") {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  const double step = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 3);
    std::vector<double> d(n);
    for (auto& x : d) x = u(rng);
    const int k = 1 + static_cast<int>(rng() % n);
    const auto H = SymmetricMatrix::diagonal(d);
    const auto grad = sigma_gradient(H, k);
    const auto hess = sigma_hessian(H, k);

    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = d[i];

    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        auto mp = m;
        auto mm = m;
        mp[static_cast<std::size_t>(i) * n + j] += step;
        mm[static_cast<std::size_t>(i) * n + j] -= step;
        const double fd = (sigma_matrix(mp, n, k) - sigma_matrix(mm, n, k)) / (2 * step);
        const double an = grad(i, j);
        CHECK(std::fabs(fd - an) <= 1e-6 * std::max({1.0, std::fabs(fd), std::fabs(an)}));
      }
    }

    // Second derivatives in a few random slot pairs per trial.
    for (int rep = 0; rep < 8; ++rep) {
      const int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
      const int c = static_cast<int>(rng() % n), e = static_cast<int>(rng() % n);
      auto pp = m, pm = m, mp2 = m, mm2 = m;
      pp[static_cast<std::size_t>(a) * n + b] += step;
      pp[static_cast<std::size_t>(c) * n + e] += step;
      pm[static_cast<std::size_t>(a) * n + b] += step;
      pm[static_cast<std::size_t>(c) * n + e] -= step;
      mp2[static_cast<std::size_t>(a) * n + b] -= step;
      mp2[static_cast<std::size_t>(c) * n + e] += step;
      mm2[static_cast<std::size_t>(a) * n + b] -= step;
      mm2[static_cast<std::size_t>(c) * n + e] -= step;
      const double fd = (sigma_matrix(pp, n, k) - sigma_matrix(pm, n, k) -
                         sigma_matrix(mp2, n, k) + sigma_matrix(mm2, n, k)) /
                        (4 * step * step);
      const double an = hess.at(a, b, c, e);
      CHECK(std::fabs(fd - an) <= 2e-5 * std::max({1.0, std::fabs(fd), std::fabs(an)}));
    }
  }
}

TEST_CASE("phi_aux spec examples") {
  {
    const double d[] = {2, 1, 0, 0};
    const auto r = phi_aux(SymmetricMatrix::diagonal(d), 2);
    CHECK(r.sigma_l1 == 0.0);
    CHECK(r.q == 0.0);
    CHECK(r.phi == 0.0);
  }
  {
    const double d[] = {3, 2, 1, 0.5};
    const auto r = phi_aux(SymmetricMatrix::diagonal(d), 2);
    CHECK(r.sigma_l1 == doctest::Approx(11.5));
    CHECK(r.q == doctest::Approx(3.0 / 11.5));
    CHECK(r.phi == doctest::Approx(11.5 + 3.0 / 11.5));
  }
  {
    const auto r = phi_aux(SymmetricMatrix::identity(4), 3);
    CHECK(r.sigma_l1 == doctest::Approx(1.0));
    CHECK(r.q == 0.0);  // sigma_5 = 0 by convention
    CHECK(r.phi == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(phi_aux(SymmetricMatrix::identity(4), 4), std::invalid_argument);
}

TEST_CASE("phi invariant: phi = sigma_l1 + q and q = 0 at the zero branch") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    SymmetricMatrix H(4);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) H.set(i, j, u(rng));
    const auto r = phi_aux(H, 2);
    CHECK(r.phi == r.sigma_l1 + r.q);
    if (r.sigma_l1 <= 0.0) CHECK(r.q == 0.0);
  }
}

TEST_CASE("q_gradient examples") {
  {
    const double d[] = {3, 2, 1, 0.5};
    const auto g = q_gradient(SymmetricMatrix::diagonal(d), 2);
    CHECK(g(3, 3) == doctest::Approx(36.0 / 132.25).epsilon(1e-12));
  }
  {
    // d = 0 slot: quotient rule collapses to sigma_3(a,b,c)^2 / sigma_3(a,b,c)^2 = 1.
    const double d[] = {1.7, 0.9, 2.3, 0.0};
    const auto g = q_gradient(SymmetricMatrix::diagonal(d), 2);
    CHECK(g(3, 3) == doctest::Approx(1.0).epsilon(1e-12));
  }
  {
    // Lemma limit probe: H = diag(1,1,s,s), entry (3,3) -> 1/4 with O(s) error.
    for (double s : {1e-2, 1e-4}) {
      const double d[] = {1, 1, s, s};
      const auto g = q_gradient(SymmetricMatrix::diagonal(d), 2);
      CHECK(std::fabs(g(2, 2) - 0.25) <= 1.0 * s);
    }
  }
  const double dneg[] = {-1, -1, -1, -1};  // sigma_3 = -4
  CHECK_THROWS_AS(q_gradient(SymmetricMatrix::diagonal(dneg), 2), std::domain_error);
}

TEST_CASE("q derivatives match finite differences wherever sigma_{l+1} > 0") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  const double step = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4;
    const int l = 1 + static_cast<int>(rng() % 2);
    std::vector<double> d(n);
    for (auto& x : d) x = u(rng);
    const auto H = SymmetricMatrix::diagonal(d);
    const auto g = q_gradient(H, l);
    const auto h = q_hessian(H, l);

    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = d[i];

    for (int i = 0; i < n; ++i) {
      auto mp = m, mm = m;
      mp[static_cast<std::size_t>(i) * n + i] += step;
      mm[static_cast<std::size_t>(i) * n + i] -= step;
      const double fd = (q_matrix(mp, n, l) - q_matrix(mm, n, l)) / (2 * step);
      CHECK(std::fabs(fd - g(i, i)) <=
            1e-6 * std::max({1.0, std::fabs(fd), std::fabs(g(i, i))}));
    }

    for (int rep = 0; rep < 10; ++rep) {
      const int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
      const int c = static_cast<int>(rng() % n), e = static_cast<int>(rng() % n);
      auto pp = m, pm = m, mp2 = m, mm2 = m;
      pp[static_cast<std::size_t>(a) * n + b] += step;
      pp[static_cast<std::size_t>(c) * n + e] += step;
      pm[static_cast<std::size_t>(a) * n + b] += step;
      pm[static_cast<std::size_t>(c) * n + e] -= step;
      mp2[static_cast<std::size_t>(a) * n + b] -= step;
      mp2[static_cast<std::size_t>(c) * n + e] += step;
      mm2[static_cast<std::size_t>(a) * n + b] -= step;
      mm2[static_cast<std::size_t>(c) * n + e] -= step;
      const double fd = (q_matrix(pp, n, l) - q_matrix(pm, n, l) - q_matrix(mp2, n, l) +
                         q_matrix(mm2, n, l)) /
                        (4 * step * step);
      const double an = h.at(a, b, c, e);
      CHECK(std::fabs(fd - an) <= 2e-5 * std::max({1.0, std::fabs(fd), std::fabs(an)}));
    }
  }
}

TEST_CASE("q_hessian symmetry under slot-pair swap and FD spot checks") {
  const double d1[] = {3, 2, 1, 0.5};
  const double d2[] = {1, 1, 1, 1};
  for (const double* d : {d1, d2}) {
    const auto H = SymmetricMatrix::diagonal(std::span<const double>(d, 4));
    const auto t = q_hessian(H, 2);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int e = 0; e < 4; ++e)
            CHECK(t.at(a, b, c, e) == doctest::Approx(t.at(c, e, a, b)).epsilon(1e-12));
  }
}

TEST_CASE("Lemma limit: bad-block q_gradient entries converge at first order in s") {
  // H = diag(g1..gl, s b1, ..., s b_{n-l}); entry (i,i), i in B, tends to
  // (sigma_1^2(B|i) - sigma_2(B|i)) / sigma_1^2(B) on (b) with O(s) error.
  const std::vector<double> good = {2.0, 1.3};
  const std::vector<double> bad = {0.7, 1.1};
  const int l = 2;

  const double b_sum = bad[0] + bad[1];
  // for i = index of bad[0]: sigma_1(B|i) = bad[1], sigma_2(B|i) = 0
  const double limit = (bad[1] * bad[1]) / (b_sum * b_sum);

  std::vector<double> errs;
  for (double s : {1e-1, 1e-2, 1e-3}) {
    const double d[] = {good[0], good[1], s * bad[0], s * bad[1]};
    const auto g = q_gradient(SymmetricMatrix::diagonal(d), l);
    errs.push_back(std::fabs(g(2, 2) - limit));
  }
  // measured order across successive decades >= 0.9
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double order = std::log10(errs[i] / errs[i + 1]);
    CHECK(order >= 0.9);
  }
}
