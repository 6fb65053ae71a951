#include "cma/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cma {

SymmetricMatrix SymmetricMatrix::identity(int n) {
  SymmetricMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> d) {
  SymmetricMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.size(); ++i) m.set(i, i, d[i]);
  return m;
}

double SymmetricMatrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::fabs(v));
  return m;
}

bool SymmetricMatrix::is_diagonal(double rel_tol) const {
  double dmax = 0.0;
  for (int i = 0; i < n_; ++i) dmax = std::max(dmax, std::fabs((*this)(i, i)));
  double off = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (i != j) off = std::max(off, std::fabs((*this)(i, j)));
  if (dmax == 0.0) return off == 0.0;
  return off <= rel_tol * dmax;
}

std::vector<double> SymmetricMatrix::diag() const {
  std::vector<double> d(n_);
  for (int i = 0; i < n_; ++i) d[i] = (*this)(i, i);
  return d;
}

EigenSym eigen_sym(const SymmetricMatrix& A) {
  const int n = A.size();
  std::vector<double> a(A.data().begin(), A.data().end());
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;

  auto at = [&](std::vector<double>& m, int i, int j) -> double& {
    return m[static_cast<std::size_t>(i) * n + j];
  };

  double fro2 = 0.0;
  for (double x : a) fro2 += x * x;
  const double stop = 1e-30 * std::max(fro2, 1e-300);

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off2 = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off2 += 2.0 * at(a, p, q) * at(a, p, q);
    if (off2 <= stop) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (apq == 0.0) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0)
                             ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                             : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = at(a, k, p);
          const double akq = at(a, k, q);
          at(a, k, p) = c * akp - s * akq;
          at(a, k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(a, p, k);
          const double aqk = at(a, q, k);
          at(a, p, k) = c * apk - s * aqk;
          at(a, q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = at(v, k, p);
          const double vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return at(a, i, i) < at(a, j, j); });

  EigenSym out;
  out.values.resize(n);
  out.vectors.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k < n; ++k) {
    out.values[k] = at(a, order[k], order[k]);
    for (int r = 0; r < n; ++r)
      out.vectors[static_cast<std::size_t>(r) * n + k] = at(v, r, order[k]);
  }
  return out;
}

std::vector<double> jacobi_eigenvalues(const SymmetricMatrix& A) {
  return eigen_sym(A).values;
}

namespace {

// In-place pivoted LU; returns permutation sign, or 0 on exact singularity.
int lu_factor(std::vector<double>& m, std::vector<int>& piv, int n) {
  int sign = 1;
  piv.resize(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::fabs(m[static_cast<std::size_t>(k) * n + k]);
    for (int r = k + 1; r < n; ++r) {
      const double v = std::fabs(m[static_cast<std::size_t>(r) * n + k]);
      if (v > best) {
        best = v;
        p = r;
      }
    }
    piv[k] = p;
    if (p != k) {
      for (int c = 0; c < n; ++c)
        std::swap(m[static_cast<std::size_t>(k) * n + c], m[static_cast<std::size_t>(p) * n + c]);
      sign = -sign;
    }
    const double pivot = m[static_cast<std::size_t>(k) * n + k];
    if (pivot == 0.0) return 0;
    for (int r = k + 1; r < n; ++r) {
      const double f = m[static_cast<std::size_t>(r) * n + k] / pivot;
      m[static_cast<std::size_t>(r) * n + k] = f;
      for (int c = k + 1; c < n; ++c)
        m[static_cast<std::size_t>(r) * n + c] -= f * m[static_cast<std::size_t>(k) * n + c];
    }
  }
  return sign;
}

} // namespace

double determinant_lu(std::span<const double> a, int n) {
  if (n == 0) return 1.0;
  std::vector<double> m(a.begin(), a.end());
  std::vector<int> piv;
  const int sign = lu_factor(m, piv, n);
  if (sign == 0) return 0.0;
  double det = sign;
  for (int k = 0; k < n; ++k) det *= m[static_cast<std::size_t>(k) * n + k];
  return det;
}

std::vector<double> solve_lu(std::span<const double> a, std::span<const double> b, int n) {
  std::vector<double> m(a.begin(), a.end());
  std::vector<int> piv;
  if (lu_factor(m, piv, n) == 0) {
    throw std::runtime_error("solve_lu: singular matrix");
  }
  std::vector<double> x(b.begin(), b.end());
  // P A = L U: apply every interchange to the right-hand side first, then
  // run the clean triangular solves.
  for (int k = 0; k < n; ++k) {
    if (piv[k] != k) std::swap(x[k], x[piv[k]]);
  }
  for (int k = 0; k < n; ++k) {
    for (int r = k + 1; r < n; ++r) x[r] -= m[static_cast<std::size_t>(r) * n + k] * x[k];
  }
  for (int k = n - 1; k >= 0; --k) {
    for (int c = k + 1; c < n; ++c) x[k] -= m[static_cast<std::size_t>(k) * n + c] * x[c];
    x[k] /= m[static_cast<std::size_t>(k) * n + k];
  }
  return x;
}

} // namespace cma
