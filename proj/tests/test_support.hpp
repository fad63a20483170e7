#pragma once
// Helpers shared by the unit tests.

#include <cstdint>
#include <algorithm>
#include <cmath>
#include <random>

#include "vgarrote/data.hpp"
#include "vgarrote/vg_core.hpp"

namespace vgtest {

inline vg::Dataset random_dataset(std::size_t p, std::size_t n, std::uint64_t seed, double noise = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  vg::Dataset d;
  d.x = vg::Matrix(p, n);
  d.y.assign(p, 0.0);
  vg::Vector w(n);
  for (auto& v : w) v = g(rng);
  for (std::size_t mu = 0; mu < p; ++mu) {
    for (std::size_t i = 0; i < n; ++i) {
      d.x(mu, i) = g(rng) + 0.3;
      d.y[mu] += w[i] * d.x(mu, i);
    }
    d.y[mu] += noise * g(rng) + 1.0;
  }
  return d;
}

inline vg::Vector random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  vg::Vector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

/// Random interior state: m in (lo, hi), w ~ U(-1.5, 1.5), beta in (0.5, 3).
inline vg::VgState random_state(std::size_t n, std::uint64_t seed, double lo = 0.05, double hi = 0.95) {
  vg::VgState s;
  s.m = random_vector(n, seed, lo, hi);
  s.w = random_vector(n, seed + 1, -1.5, 1.5);
  s.beta = random_vector(1, seed + 2, 0.5, 3.0)[0];
  s.gamma = random_vector(1, seed + 3, -5.0, 0.0)[0];
  return s;
}

/// p samples of one centered feature with <x^2> = 1 and a centered output with
/// <y^2> = 1 whose squared correlation with x is exactly rho.
inline vg::Dataset univariate_dataset(std::size_t p, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  vg::Vector x(p), e(p);
  for (std::size_t mu = 0; mu < p; ++mu) {
    x[mu] = g(rng);
    e[mu] = g(rng);
  }
  auto center_scale = [p](vg::Vector& v) {
    double mean = 0.0;
    for (double t : v) mean += t;
    mean /= p;
    double ss = 0.0;
    for (double& t : v) {
      t -= mean;
      ss += t * t;
    }
    const double s = std::sqrt(ss / p);
    for (double& t : v) t /= s;
  };
  center_scale(x);
  double xe = 0.0;
  for (std::size_t mu = 0; mu < p; ++mu) xe += x[mu] * e[mu];
  for (std::size_t mu = 0; mu < p; ++mu) e[mu] -= xe / p * x[mu];
  center_scale(e);
  vg::Dataset d;
  d.x = vg::Matrix(p, 1);
  d.y.resize(p);
  for (std::size_t mu = 0; mu < p; ++mu) {
    d.x(mu, 0) = x[mu];
    d.y[mu] = std::sqrt(rho) * x[mu] + std::sqrt(1.0 - rho) * e[mu];
  }
  return d;
}

}  // namespace vgtest
