#include <cmath>
#include <numbers>

#include "doctest.h"
#include "test_support.hpp"
#include "vgarrote/errors.hpp"
#include "vgarrote/math.hpp"
#include "vgarrote/vg_core.hpp"

using vg::Vector;
using vg::VgState;

namespace {

vg::SufficientStats stats_for(std::size_t p, std::size_t n, std::uint64_t seed) {
  return vg::sufficient_stats(vg::center(vgtest::random_dataset(p, n, seed)), true);
}

// Largest component-wise error between analytic and central-difference
// derivatives, relative to max(|analytic|, 1e-3 * largest component).
double gradient_check(const VgState& s0, const vg::SufficientStats& st) {
  const auto g = vg::free_energy_gradient(s0, st);
  double scale = std::abs(g.dbeta);
  for (std::size_t i = 0; i < st.n; ++i) scale = std::max({scale, std::abs(g.dm[i]), std::abs(g.dw[i])});
  auto rel = [&](double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max(std::abs(analytic), 1e-3 * scale);
  };
  auto f = [&](const VgState& s) { return vg::free_energy(s, st); };
  double worst = 0.0;
  for (std::size_t i = 0; i < st.n; ++i) {
    VgState a = s0, b = s0;
    const double hm = 1e-6 * std::min(s0.m[i], 1.0 - s0.m[i]);
    a.m[i] += hm;
    b.m[i] -= hm;
    worst = std::max(worst, rel(g.dm[i], (f(a) - f(b)) / (2 * hm)));
    a = s0;
    b = s0;
    const double hw = 1e-6 * std::max(1.0, std::abs(s0.w[i]));
    a.w[i] += hw;
    b.w[i] -= hw;
    worst = std::max(worst, rel(g.dw[i], (f(a) - f(b)) / (2 * hw)));
  }
  VgState a = s0, b = s0;
  const double hb = 1e-6 * s0.beta;
  a.beta += hb;
  b.beta -= hb;
  return std::max(worst, rel(g.dbeta, (f(a) - f(b)) / (2 * hb)));
}

}  // namespace

TEST_CASE("analytic gradient matches central differences") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 2 + seed % 9, p = 5 + 3 * (seed % 7);
    const auto st = stats_for(p, n, seed);
    CAPTURE(seed);
    CHECK(gradient_check(vgtest::random_state(n, 100 * seed), st) < 1e-5);
  }
}

TEST_CASE("free energy on a hand-computed single-feature state") {
  // chi = 1, b = 1, sigma_y2 = 1: v = 0.25, fit = 1/16 - 1/2 + 1 = 0.5625,
  // ridge = 0.5 * 0.5 * 0.25 = 0.0625.
  const auto st = vg::sufficient_stats(vg::center(vg::Dataset{vg::Matrix(2, 1), {1, -1}}), true);
  vg::SufficientStats s = st;
  s.b = {1};
  s.chi_diag = {1};
  (*s.chi)(0, 0) = 1;
  s.sigma_y2 = 1;
  s.zero_variance.clear();
  const VgState state{{0.5}, {0.5}, 2.0, -1.0, 1.0};
  const double expected = 0.5 * 2.0 * 2.0 * (0.5625 + 0.0625) + 1.0 * 0.5 + 2 * 0.5 * std::log(0.5) -
                          0.5 * 2.0 * std::log(2.0 / (2.0 * std::numbers::pi));
  CHECK(vg::free_energy(state, s) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("free energy rejects m outside the clip range") {
  const auto st = stats_for(8, 3, 2);
  VgState s = vgtest::random_state(3, 5);
  s.m[1] = 0.0;
  CHECK_THROWS_AS(vg::free_energy(s, st), std::invalid_argument);
  s = vgtest::random_state(3, 5);
  s.beta = 0.0;
  CHECK_THROWS_AS(vg::free_energy(s, st), std::invalid_argument);
}

TEST_CASE("w_update solves the variational covariance system") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 3 + seed, p = 4 + 2 * seed;
    const auto st = stats_for(p, n, seed);
    const Vector m = vgtest::random_vector(n, seed + 50, 0.05, 0.95);
    const Vector w = vg::w_update(m, st);
    const Vector ref = vg::solve_lu(vg::variational_covariance(m, st), st.b);
    for (std::size_t i = 0; i < n; ++i) CHECK(vgtest::rel_err(w[i], ref[i]) < 1e-8);
    const Vector r = vg::multiply(vg::variational_covariance(m, st), w);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(r[i] - st.b[i]) < 1e-10);
  }
}

TEST_CASE("w and beta updates make their partial derivatives vanish") {
  const auto st = stats_for(15, 6, 8);
  VgState s = vgtest::random_state(6, 9);
  s.w = vg::w_update(s.m, st);
  s.beta = vg::beta_update(s.m, s.w, st).beta;
  const auto g = vg::free_energy_gradient(s, st);
  for (double d : g.dw) CHECK(std::abs(d) < 1e-9);
  CHECK(std::abs(g.dbeta) < 1e-9);
}

TEST_CASE("orthogonal beta update") {
  // chi = I, m -> 1, w = b: 1/beta = sigma_y2 - sum b_i^2.
  vg::SufficientStats st;
  st.n = 2;
  st.p = 10;
  st.b = {0.5, 0.2};
  st.chi_diag = {1, 1};
  st.chi = vg::Matrix::identity(2);
  st.sigma_y2 = 1.0;
  const auto bu = vg::beta_update({1.0, 1.0}, {0.5, 0.2}, st);
  CHECK(bu.beta == doctest::Approx(1.0 / 0.71));
  CHECK_FALSE(bu.capped);
  const auto capped = vg::beta_update({1.0, 1.0}, {2.0, 0.0}, st);
  CHECK(capped.capped);
  CHECK(capped.beta == 1e12);
}

TEST_CASE("m proposal is the logistic of the field") {
  const auto st = stats_for(12, 4, 3);
  VgState s = vgtest::random_state(4, 17);
  const Vector q = vg::m_proposal(s, st);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(q[i] == doctest::Approx(vg::logistic(s.gamma + 0.5 * s.beta * 12 * s.w[i] * s.w[i] * st.chi_diag[i])));
  s.gamma = -1e6;
  for (double v : vg::m_proposal(s, st, 1e-12)) CHECK(v == 1e-12);
}

TEST_CASE("solve_primal converges to a stationary point") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 3 + seed % 5, p = 30;
    const auto st = stats_for(p, n, seed);
    vg::SolveOptions o;
    o.tol = 1e-9;
    const auto sol = vg::solve_primal(st, -3.0, Vector(n, 0.5), o);
    CAPTURE(seed);
    REQUIRE(sol.converged);
    CHECK(vg::stationarity_residual(sol.state(), st) <= 100 * o.tol);
    CHECK(sol.free_energy == doctest::Approx(vg::free_energy(sol.state(), st)));
    for (double m : sol.m) CHECK((m > 0.0 && m < 1.0));
  }
}

TEST_CASE("solver options are validated") {
  const auto st = stats_for(8, 2, 1);
  vg::SolveOptions o;
  o.tol = 0;
  CHECK_THROWS_AS(vg::solve_primal(st, -1.0, {0.5, 0.5}, o), std::invalid_argument);
  CHECK_THROWS_AS(vg::solve_primal(st, -1.0, {0.5}, {}), std::invalid_argument);
}

TEST_CASE("prediction adds back the training means") {
  vg::VgSolution s;
  s.m = {0.5, 1.0};
  s.w = {2.0, -1.0};
  vg::Matrix x(1, 2);
  x(0, 0) = 3.0;
  x(0, 1) = 1.0;
  // v = (1, -1); offset = 10 - (1*1 - 1*2) = 11; y = 3 - 1 + 11.
  CHECK(vg::predict(s, x, {1.0, 2.0}, 10.0) == Vector{13.0});
  CHECK_THROWS_AS(vg::predict(s, vg::Matrix(1, 3), {1, 2}, 0), vg::DataError);
}

TEST_CASE("solution JSON round trip") {
  const auto st = stats_for(20, 4, 6);
  const auto sol = vg::solve_primal(st, -2.0, Vector(4, 0.3));
  const auto back = vg::solution_from_json(vg::to_json(sol));
  CHECK(back.m == sol.m);
  CHECK(back.w == sol.w);
  CHECK(back.beta == sol.beta);
  CHECK(back.free_energy == sol.free_energy);
  CHECK(back.iterations == sol.iterations);
  CHECK(back.converged == sol.converged);
}
