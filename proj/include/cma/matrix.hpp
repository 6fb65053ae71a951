#pragma once

#include <array>
#include <span>
#include <vector>

namespace cma {

using Vec4 = std::array<double, 4>;

/// Dense real symmetric matrix, row-major storage. Sizes stay small here
/// (n <= 8 across the certificate and audit paths), so everything is plain
/// O(n^3) code with no blocking.
class SymmetricMatrix {
 public:
  SymmetricMatrix() : n_(0) {}
  explicit SymmetricMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

  static SymmetricMatrix identity(int n);
  static SymmetricMatrix diagonal(std::span<const double> d);

  int size() const { return n_; }

  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

  /// Sets (i,j) and (j,i).
  void set(int i, int j, double v) {
    a_[static_cast<std::size_t>(i) * n_ + j] = v;
    a_[static_cast<std::size_t>(j) * n_ + i] = v;
  }

  void add(int i, int j, double v) {
    a_[static_cast<std::size_t>(i) * n_ + j] += v;
    if (i != j) a_[static_cast<std::size_t>(j) * n_ + i] += v;
  }

  std::span<const double> data() const { return a_; }
  std::span<double> mutable_data() { return a_; }

  double max_abs() const;
  bool is_diagonal(double rel_tol = 1e-12) const;
  std::vector<double> diag() const;

 private:
  int n_;
  std::vector<double> a_;
};

struct EigenSym {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column k = eigenvector of values[k], row-major n x n
};

/// Cyclic Jacobi with a fixed rotation order; deterministic.
EigenSym eigen_sym(const SymmetricMatrix& A);
std::vector<double> jacobi_eigenvalues(const SymmetricMatrix& A);

/// Determinant by partially pivoted LU (test/support use).
double determinant_lu(std::span<const double> a, int n);

/// Solves A x = b by partially pivoted LU; A row-major n x n, overwritten copy.
std::vector<double> solve_lu(std::span<const double> a, std::span<const double> b, int n);

/// Dense rank-4 tensor indexed (i,j,k,l), n^4 doubles. Carrier of the
/// second-derivative tables of the symmetric-function calculus.
struct Tensor4 {
  int n = 0;
  std::vector<double> a;

  Tensor4() = default;
  explicit Tensor4(int dim)
      : n(dim), a(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}

  double& at(int i, int j, int k, int l) {
    return a[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  }
  double at(int i, int j, int k, int l) const {
    return a[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  }
};

} // namespace cma
