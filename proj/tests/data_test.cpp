#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "vgarrote/data.hpp"
#include "vgarrote/errors.hpp"
#include "vgarrote/linalg.hpp"

using vg::Dataset;
using vg::Matrix;
using vg::Vector;

namespace {

Dataset tiny(std::initializer_list<std::initializer_list<double>> xs, Vector y) {
  Dataset d;
  d.x = Matrix(xs.size(), xs.begin()->size());
  std::size_t r = 0;
  for (const auto& row : xs) {
    std::size_t c = 0;
    for (double v : row) d.x(r, c++) = v;
    ++r;
  }
  d.y = std::move(y);
  return d;
}

}  // namespace

TEST_CASE("center removes column and output means") {
  const auto c = vg::center(tiny({{1}, {3}}, {2, 4}));
  CHECK(c.x_c(0, 0) == -1.0);
  CHECK(c.x_c(1, 0) == 1.0);
  CHECK(c.y_c == Vector{-1, 1});
  CHECK(c.x_mean == Vector{2});
  CHECK(c.y_mean == 3.0);
}

TEST_CASE("centering is idempotent and column sums vanish") {
  const Dataset d = vgtest::random_dataset(5, 3, 42);
  const auto c = vg::center(d);
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t mu = 0; mu < 5; ++mu) s += c.x_c(mu, i);
    CHECK(std::abs(s) < 1e-12);
  }
  CHECK(std::abs(std::accumulate(c.y_c.begin(), c.y_c.end(), 0.0)) < 1e-12);

  const auto cc = vg::center(Dataset{c.x_c, c.y_c});
  for (std::size_t mu = 0; mu < 5; ++mu)
    for (std::size_t i = 0; i < 3; ++i) CHECK(cc.x_c(mu, i) == doctest::Approx(c.x_c(mu, i)).epsilon(1e-14));
  for (double m : cc.x_mean) CHECK(std::abs(m) < 1e-15);
}

TEST_CASE("validate rejects malformed data") {
  CHECK_THROWS_AS(vg::validate(tiny({{1}}, {1})), vg::DataError);
  CHECK_THROWS_AS(vg::validate(tiny({{1}, {2}}, {1})), vg::DataError);
  Dataset bad = tiny({{1}, {2}}, {1, 2});
  bad.x(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(vg::validate(bad), vg::DataError);
  CHECK_THROWS_AS(vg::center(bad), vg::DataError);
}

TEST_CASE("sufficient statistics on a two-point set") {
  const auto c = vg::center(tiny({{1}, {-1}}, {1, -1}));
  const auto s = vg::sufficient_stats(c, true);
  CHECK(s.b == Vector{1});
  CHECK(s.chi_diag == Vector{1});
  CHECK(s.sigma_y2 == 1.0);
  CHECK((*s.chi)(0, 0) == 1.0);
  CHECK(s.p == 2);
  CHECK(s.n == 1);
}

TEST_CASE("zero output gives zero b and sigma_y2") {
  const auto c = vg::center(tiny({{1, 2}, {3, 5}, {0, 1}}, {7, 7, 7}));
  const auto s = vg::sufficient_stats(c, false);
  CHECK(s.b == Vector{0, 0});
  CHECK(s.sigma_y2 == 0.0);
  CHECK_FALSE(s.chi.has_value());
}

TEST_CASE("sufficient statistics match a brute-force double loop") {
  const auto c = vg::center(vgtest::random_dataset(10, 4, 7));
  const auto s = vg::sufficient_stats(c, true);
  for (std::size_t i = 0; i < 4; ++i) {
    double b = 0.0;
    for (std::size_t mu = 0; mu < 10; ++mu) b += c.x_c(mu, i) * c.y_c[mu];
    CHECK(s.b[i] == doctest::Approx(b / 10).epsilon(1e-12));
    for (std::size_t j = 0; j < 4; ++j) {
      double chi = 0.0;
      for (std::size_t mu = 0; mu < 10; ++mu) chi += c.x_c(mu, i) * c.x_c(mu, j);
      CHECK((*s.chi)(i, j) == doctest::Approx(chi / 10).epsilon(1e-12));
      CHECK((*s.chi)(i, j) == (*s.chi)(j, i));
    }
    CHECK(s.chi_diag[i] == (*s.chi)(i, i));
  }
  double y2 = 0.0;
  for (double v : c.y_c) y2 += v * v;
  CHECK(s.sigma_y2 == doctest::Approx(y2 / 10).epsilon(1e-12));
}

TEST_CASE("sufficient statistics are invariant under row permutation") {
  const Dataset d = vgtest::random_dataset(12, 3, 8);
  std::vector<std::size_t> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[2], perm[7]);
  const auto a = vg::sufficient_stats(vg::center(d), true);
  const auto b = vg::sufficient_stats(vg::center(vg::select_rows(d, perm)), true);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.b[i] == doctest::Approx(b.b[i]).epsilon(1e-12));
    for (std::size_t j = 0; j < 3; ++j) CHECK((*a.chi)(i, j) == doctest::Approx((*b.chi)(i, j)).epsilon(1e-12));
  }
  CHECK(a.sigma_y2 == doctest::Approx(b.sigma_y2).epsilon(1e-12));
}

TEST_CASE("chi is full rank for Gaussian data with n < p") {
  const auto s = vg::sufficient_stats(vg::center(vgtest::random_dataset(40, 10, 9)), true);
  CHECK(vg::symmetric_eigenvalues(*s.chi).front() > 0.0);
}

TEST_CASE("constant columns are flagged and masked") {
  const auto c = vg::center(tiny({{1, 5}, {2, 5}, {4, 5}}, {1, 2, 3}));
  const auto s = vg::sufficient_stats(c, true);
  CHECK(s.zero_variance == std::vector<std::size_t>{1});
  CHECK_FALSE(s.is_active(1));
  CHECK(s.is_active(0));
  CHECK(s.b[1] == 0.0);
}

TEST_CASE("split partitions rows deterministically") {
  Dataset d;
  d.x = Matrix(100, 1);
  d.y.resize(100);
  for (std::size_t mu = 0; mu < 100; ++mu) d.x(mu, 0) = d.y[mu] = static_cast<double>(mu);

  auto [tr, va, te] = vg::split(d, 50, 50, 0, 1);
  CHECK(tr.samples() == 50);
  CHECK(va.samples() == 50);
  CHECK(te.samples() == 0);
  std::set<double> seen(tr.y.begin(), tr.y.end());
  seen.insert(va.y.begin(), va.y.end());
  CHECK(seen.size() == 100);
  for (std::size_t mu = 0; mu < 50; ++mu) CHECK(tr.x(mu, 0) == tr.y[mu]);

  auto [tr2, va2, te2] = vg::split(d, 50, 50, 0, 1);
  CHECK(tr2.y == tr.y);
  auto [tr3, va3, te3] = vg::split(d, 50, 50, 0, 2);
  CHECK(tr3.y != tr.y);

  CHECK_THROWS_AS(vg::split(d, 60, 50, 0, 1), vg::DataError);
}

TEST_CASE("dataset text round trip and parse errors") {
  const Dataset d = vgtest::random_dataset(6, 3, 5);
  std::stringstream ss;
  vg::write_dataset(ss, d, "generated\nsecond line");
  const Dataset back = vg::read_dataset(ss);
  CHECK(back.x == d.x);
  CHECK(back.y == d.y);

  std::istringstream tabbed("# y\tx1\n1\t2\n3\t4\n");
  const Dataset t = vg::read_dataset(tabbed);
  CHECK(t.samples() == 2);
  CHECK(t.x(1, 0) == 4.0);

  std::istringstream ragged("1,2,3\n4,5\n");
  CHECK_THROWS_AS(vg::read_dataset(ragged), vg::DataError);
  std::istringstream junk("1,abc\n2,3\n");
  CHECK_THROWS_AS(vg::read_dataset(junk), vg::DataError);
  std::istringstream empty("");
  CHECK_THROWS_AS(vg::read_dataset(empty), vg::DataError);
  CHECK_THROWS_AS(vg::read_dataset_file("/nonexistent/file.csv"), vg::DataError);
}
