#include <cmath>

#include "doctest.h"
#include "test_support.hpp"
#include "vgarrote/errors.hpp"
#include "vgarrote/linalg.hpp"
#include "vgarrote/simd.hpp"

using vg::Matrix;
using vg::Vector;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  const Vector v = vgtest::random_vector(r * c, seed);
  Matrix m(r, c);
  std::copy(v.begin(), v.end(), m.data().begin());
  return m;
}

Matrix spd(std::size_t n, std::uint64_t seed) {
  const Matrix a = random_matrix(n + 3, n, seed);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n + 3; ++k) s(i, j) += a(k, i) * a(k, j);
  for (std::size_t i = 0; i < n; ++i) s(i, i) += 0.1;
  return s;
}

double residual(const Matrix& a, const Vector& x, const Vector& b) {
  const Vector ax = vg::multiply(a, x);
  double r = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) r = std::max(r, std::abs(ax[i] - b[i]));
  return r;
}

}  // namespace

TEST_CASE("multiply and multiply_transposed agree with the definitions") {
  const Matrix m = random_matrix(4, 3, 1);
  const Vector x = vgtest::random_vector(3, 2);
  const Vector y = vgtest::random_vector(4, 3);
  const Vector mx = vg::multiply(m, x);
  const Vector mty = vg::multiply_transposed(m, y);
  for (std::size_t r = 0; r < 4; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 3; ++c) s += m(r, c) * x[c];
    CHECK(mx[r] == doctest::Approx(s).epsilon(1e-14));
  }
  for (std::size_t c = 0; c < 3; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < 4; ++r) s += m(r, c) * y[r];
    CHECK(mty[c] == doctest::Approx(s).epsilon(1e-14));
  }
  CHECK(m.transposed().transposed() == m);
  CHECK(m.column(1) == Vector{m(0, 1), m(1, 1), m(2, 1), m(3, 1)});
}

TEST_CASE("LU solves general systems, including ones that need pivoting") {
  Matrix a(2, 2);
  a(0, 0) = 0.0;
  a(0, 1) = 1.0;
  a(1, 0) = 2.0;
  a(1, 1) = 3.0;
  const Vector x = vg::solve_lu(a, Vector{4.0, 11.0});
  CHECK(x[0] == doctest::Approx(-0.5));
  CHECK(x[1] == doctest::Approx(4.0));

  for (std::size_t n : {1u, 5u, 17u, 60u}) {
    const Matrix m = random_matrix(n, n, 100 + n);
    const Vector b = vgtest::random_vector(n, 200 + n);
    CHECK(residual(m, vg::solve_lu(m, b), b) < 1e-10);
  }
}

TEST_CASE("LU rejects singular matrices with a condition estimate") {
  Matrix a(3, 3, 1.0);
  try {
    vg::LuDecomposition lu(a);
    FAIL("expected SingularMatrixError");
  } catch (const vg::SingularMatrixError& e) {
    CHECK(e.condition_estimate() > 1e13);
  }
}

TEST_CASE("Cholesky solves SPD systems and matches LU") {
  for (std::size_t n : {1u, 4u, 23u, 50u}) {
    const Matrix s = spd(n, 7 + n);
    const Vector b = vgtest::random_vector(n, 9 + n);
    const Vector xc = vg::solve_cholesky(s, b);
    const Vector xl = vg::solve_lu(s, b);
    CHECK(residual(s, xc, b) < 1e-10);
    for (std::size_t i = 0; i < n; ++i) CHECK(xc[i] == doctest::Approx(xl[i]).epsilon(1e-8));
  }
  Matrix indefinite = Matrix::identity(2);
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(vg::CholeskyDecomposition{indefinite}, vg::SingularMatrixError);
  CHECK_THROWS_AS(vg::CholeskyDecomposition{Matrix(2, 2)}, vg::NumericalError);
}

TEST_CASE("Jacobi eigenvalues: known spectrum and trace/determinant identities") {
  Matrix a(2, 2);
  a(0, 0) = 2.0;
  a(0, 1) = a(1, 0) = 1.0;
  a(1, 1) = 2.0;
  const Vector e = vg::symmetric_eigenvalues(a);
  CHECK(e[0] == doctest::Approx(1.0));
  CHECK(e[1] == doctest::Approx(3.0));

  const Matrix s = spd(8, 3);
  const Vector ev = vg::symmetric_eigenvalues(s);
  double trace = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    trace += s(i, i);
    sum += ev[i];
  }
  CHECK(sum == doctest::Approx(trace).epsilon(1e-10));
  CHECK(std::is_sorted(ev.begin(), ev.end()));
  CHECK(ev.front() > 0.0);
}

TEST_CASE("solvers give the same answer on both SIMD backends") {
  const vg::simd::Backend before = vg::simd::active_backend();
  const Matrix s = spd(40, 11);
  const Vector b = vgtest::random_vector(40, 12);
  vg::simd::set_backend(vg::simd::Backend::scalar);
  const Vector ref_c = vg::solve_cholesky(s, b);
  const Vector ref_l = vg::solve_lu(s, b);
  for (vg::simd::Backend be : {vg::simd::Backend::scalar, vg::simd::Backend::avx2}) {
    if (!vg::simd::backend_available(be)) continue;
    vg::simd::set_backend(be);
    const Vector xc = vg::solve_cholesky(s, b);
    const Vector xl = vg::solve_lu(s, b);
    for (std::size_t i = 0; i < 40; ++i) {
      CHECK(xc[i] == doctest::Approx(ref_c[i]).epsilon(1e-10));
      CHECK(xl[i] == doctest::Approx(ref_l[i]).epsilon(1e-10));
    }
  }
  vg::simd::set_backend(before);
}
