#include "vgarrote/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vgarrote/errors.hpp"
#include "vgarrote/simd.hpp"

namespace vg {
namespace {

// Pivots smaller than this fraction of the largest pivot count as zero.
constexpr double kSingularRatio = 1e-14;

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Vector Matrix::column(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

Vector multiply(const Matrix& m, std::span<const double> x) {
  Vector y(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) y[r] = simd::dot(m.row(r), x);
  return y;
}

Vector multiply_transposed(const Matrix& m, std::span<const double> x) {
  Vector y(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (x[r] != 0.0) simd::axpy(x[r], m.row(r), y);
  return y;
}

LuDecomposition::LuDecomposition(Matrix a) : lu_(std::move(a)) {
  const std::size_t n = lu_.rows();
  if (lu_.cols() != n) throw std::invalid_argument("LU: matrix must be square");
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

  double max_pivot = 0.0;
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::abs(lu_(r, k));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (piv != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(piv).begin());
      std::swap(perm_[k], perm_[piv]);
    }
    max_pivot = std::max(max_pivot, best);
    min_pivot = std::min(min_pivot, best);
    if (!(best > kSingularRatio * max_pivot) || !std::isfinite(best)) {
      cond_ = best > 0.0 ? max_pivot / best : std::numeric_limits<double>::infinity();
      throw SingularMatrixError("singular matrix in LU at column " + std::to_string(k), cond_);
    }
    const double inv = 1.0 / lu_(k, k);
    const auto pivot_tail = lu_.row(k).subspan(k + 1);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = lu_(r, k) * inv;
      lu_(r, k) = f;
      if (f != 0.0) simd::axpy(-f, pivot_tail, lu_.row(r).subspan(k + 1));
    }
  }
  cond_ = n == 0 ? 1.0 : max_pivot / min_pivot;
}

Vector LuDecomposition::solve(std::span<const double> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw std::invalid_argument("LU solve: dimension mismatch");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = lu_.row(i);
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= r[j] * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    const auto r = lu_.row(i);
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= r[j] * x[j];
    x[i] = s / r[i];
  }
  return x;
}

CholeskyDecomposition::CholeskyDecomposition(Matrix a) : l_(std::move(a)) {
  const std::size_t n = l_.rows();
  if (l_.cols() != n) throw std::invalid_argument("Cholesky: matrix must be square");
  double max_d = 0.0;
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const auto lj = l_.row(j).first(j);
    double d = l_(j, j) - simd::dot(lj, lj);
    max_d = std::max(max_d, std::abs(l_(j, j)));
    if (!(d > kSingularRatio * max_d) || !std::isfinite(d)) {
      cond_ = d > 0.0 ? max_d / d : std::numeric_limits<double>::infinity();
      throw SingularMatrixError("matrix not positive definite at column " + std::to_string(j),
                                cond_);
    }
    d = std::sqrt(d);
    l_(j, j) = d;
    min_d = std::min(min_d, d);
    const double inv = 1.0 / d;
    for (std::size_t i = j + 1; i < n; ++i)
      l_(i, j) = (l_(i, j) - simd::dot(l_.row(i).first(j), lj)) * inv;
  }
  // Zero the strict upper triangle so l_ is exactly L.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) l_(i, j) = 0.0;
  double max_l = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_l = std::max(max_l, l_(i, i));
  cond_ = n == 0 ? 1.0 : (max_l / min_d) * (max_l / min_d);
}

Vector CholeskyDecomposition::solve(std::span<const double> b) const {
  const std::size_t n = l_.rows();
  if (b.size() != n) throw std::invalid_argument("Cholesky solve: dimension mismatch");
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) x[i] = (x[i] - simd::dot(l_.row(i).first(i), x)) / l_(i, i);
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l_(k, i) * x[k];
    x[i] = s / l_(i, i);
  }
  return x;
}

Vector solve_lu(Matrix a, std::span<const double> b) { return LuDecomposition(std::move(a)).solve(b); }

Vector solve_cholesky(Matrix a, std::span<const double> b) {
  return CholeskyDecomposition(std::move(a)).solve(b);
}

Vector symmetric_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace vg
