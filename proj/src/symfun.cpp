#include "cma/symfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cma::symfun {

namespace {

void check_spectrum(std::span<const double> lambda) {
  if (lambda.empty()) {
    throw std::invalid_argument("sigma_k: empty spectrum");
  }
  for (double v : lambda) {
    if (!std::isfinite(v)) throw std::invalid_argument("sigma_k: non-finite entry");
  }
}

void require_diagonal(const SymmetricMatrix& H, const char* op) {
  if (!H.is_diagonal()) {
    throw std::invalid_argument(std::string(op) + ": input matrix is not diagonal");
  }
}

// sigma_k of the diagonal with entries at `skip1`/`skip2` zeroed (-1 = none).
double sigma_excl(std::span<const double> d, int k, int skip1, int skip2 = -1) {
  const int n = static_cast<int>(d.size());
  if (k < 0) return 0.0;
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    const double x = (i == skip1 || i == skip2) ? 0.0 : d[i];
    for (int j = std::min(i + 1, k); j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e[k];
}

} // namespace

double sigma_k(std::span<const double> lambda, int k) {
  check_spectrum(lambda);
  const int n = static_cast<int>(lambda.size());
  if (k < -1 || k > n + 1) {
    throw std::invalid_argument("sigma_k: k outside [-1, n+1]");
  }
  if (k == -1 || k == n + 1) return 0.0;
  return sigma_excl(lambda, k, -1);
}

std::vector<double> sigma_all(std::span<const double> lambda) {
  check_spectrum(lambda);
  const int n = static_cast<int>(lambda.size());
  std::vector<double> e(static_cast<std::size_t>(n) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j >= 1; --j) e[j] += lambda[i] * e[j - 1];
  }
  return e;
}

double sigma_k_excluding(std::span<const double> lambda, int k,
                         std::span<const int> excluded) {
  check_spectrum(lambda);
  const int n = static_cast<int>(lambda.size());
  if (k < -1 || k > n + 1) {
    throw std::invalid_argument("sigma_k_excluding: k outside [-1, n+1]");
  }
  if (excluded.empty() || excluded.size() > 2) {
    throw std::invalid_argument("sigma_k_excluding: expected 1 or 2 excluded indices");
  }
  int s1 = excluded[0];
  int s2 = (excluded.size() == 2) ? excluded[1] : -1;
  if (s1 < 0 || s1 >= n || (excluded.size() == 2 && (s2 < 0 || s2 >= n || s2 == s1))) {
    throw std::invalid_argument("sigma_k_excluding: invalid excluded index");
  }
  if (k == -1 || k == n + 1) return 0.0;
  return sigma_excl(lambda, k, s1, s2);
}

SymmetricMatrix sigma_gradient(const SymmetricMatrix& H, int k) {
  require_diagonal(H, "sigma_gradient");
  const int n = H.size();
  if (k < 1 || k > n) throw std::invalid_argument("sigma_gradient: k outside [1, n]");
  const std::vector<double> d = H.diag();
  SymmetricMatrix g(n);
  for (int i = 0; i < n; ++i) g.set(i, i, sigma_excl(d, k - 1, i));
  return g;
}

Tensor4 sigma_hessian(const SymmetricMatrix& H, int k) {
  require_diagonal(H, "sigma_hessian");
  const int n = H.size();
  if (k < 1 || k > n) throw std::invalid_argument("sigma_hessian: k outside [1, n]");
  const std::vector<double> d = H.diag();
  Tensor4 t(n);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < n; ++p) {
      if (i == p) continue;
      const double s = sigma_excl(d, k - 2, i, p);
      t.at(i, i, p, p) = s;
      t.at(i, p, p, i) = -s;
    }
  }
  return t;
}

AuxFunctionValue phi_aux(const SymmetricMatrix& H, int l) {
  const int n = H.size();
  if (l < 0 || l > n - 1) throw std::invalid_argument("phi_aux: l outside [0, n-1]");
  std::vector<double> lam =
      H.is_diagonal() ? H.diag() : jacobi_eigenvalues(H);
  const double s1 = sigma_k(lam, l + 1);
  const double s2 = sigma_k(lam, l + 2);
  AuxFunctionValue out;
  out.sigma_l1 = s1;
  out.q = (s1 > 0.0) ? s2 / s1 : 0.0;
  out.phi = out.sigma_l1 + out.q;
  out.rank_level = l;
  return out;
}

SymmetricMatrix q_gradient(const SymmetricMatrix& H, int l) {
  require_diagonal(H, "q_gradient");
  const int n = H.size();
  if (l < 0 || l > n - 1) throw std::invalid_argument("q_gradient: l outside [0, n-1]");
  const std::vector<double> d = H.diag();
  const double D = sigma_excl(d, l + 1, -1);
  if (D <= 0.0) throw std::domain_error("q_gradient: sigma_{l+1}(H) <= 0");
  const double N = sigma_excl(d, l + 2, -1);
  SymmetricMatrix g(n);
  for (int i = 0; i < n; ++i) {
    const double Ni = sigma_excl(d, l + 1, i);
    const double Di = sigma_excl(d, l, i);
    g.set(i, i, (Ni * D - N * Di) / (D * D));
  }
  return g;
}

Tensor4 q_hessian(const SymmetricMatrix& H, int l) {
  require_diagonal(H, "q_hessian");
  const int n = H.size();
  if (l < 0 || l > n - 1) throw std::invalid_argument("q_hessian: l outside [0, n-1]");
  const std::vector<double> d = H.diag();
  const double D = sigma_excl(d, l + 1, -1);
  if (D <= 0.0) throw std::domain_error("q_hessian: sigma_{l+1}(H) <= 0");
  const double N = sigma_excl(d, l + 2, -1);
  const double q = N / D;

  std::vector<double> Nd(n), Dd(n), qd(n);
  for (int i = 0; i < n; ++i) {
    Nd[i] = sigma_excl(d, l + 1, i);
    Dd[i] = sigma_excl(d, l, i);
    qd[i] = (Nd[i] - q * Dd[i]) / D;
  }

  Tensor4 t(n);
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < n; ++c) {
      const double N2 = (a != c) ? sigma_excl(d, l, a, c) : 0.0;
      const double D2 = (a != c) ? sigma_excl(d, l - 1, a, c) : 0.0;
      t.at(a, a, c, c) = (N2 - qd[a] * Dd[c] - qd[c] * Dd[a] - q * D2) / D;
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const double N2 = -sigma_excl(d, l, a, b);
      const double D2 = -sigma_excl(d, l - 1, a, b);
      t.at(a, b, b, a) = (N2 - q * D2) / D;
    }
  }
  return t;
}

} // namespace cma::symfun
