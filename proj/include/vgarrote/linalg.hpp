#pragma once
// Small dense linear algebra: a row-major matrix, LU with partial pivoting
// for general systems and Cholesky for symmetric positive definite ones.

#include <cstddef>
#include <span>
#include <vector>

namespace vg {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  Vector column(std::size_t c) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y = M x
Vector multiply(const Matrix& m, std::span<const double> x);
/// y = M^T x
Vector multiply_transposed(const Matrix& m, std::span<const double> x);

/// LU factorization with partial pivoting. Throws SingularMatrixError when a
/// pivot vanishes relative to the largest one.
class LuDecomposition {
 public:
  explicit LuDecomposition(Matrix a);

  Vector solve(std::span<const double> b) const;
  /// Ratio of largest to smallest |U_ii|; a cheap lower bound on cond(A).
  double condition_estimate() const noexcept { return cond_; }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  double cond_ = 1.0;
};

/// Cholesky factorization A = L L^T. Throws SingularMatrixError if A is not
/// numerically positive definite.
class CholeskyDecomposition {
 public:
  explicit CholeskyDecomposition(Matrix a);

  Vector solve(std::span<const double> b) const;
  double condition_estimate() const noexcept { return cond_; }

 private:
  Matrix l_;
  double cond_ = 1.0;
};

Vector solve_lu(Matrix a, std::span<const double> b);
Vector solve_cholesky(Matrix a, std::span<const double> b);

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
Vector symmetric_eigenvalues(Matrix a);

double max_abs(std::span<const double> v);

}  // namespace vg
