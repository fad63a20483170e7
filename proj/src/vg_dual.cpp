#include "vgarrote/vg_dual.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "vgarrote/simd.hpp"

namespace vg {

namespace {

// I + X diag(d) X^T, upper triangle by dot4 and mirrored so it is exactly symmetric.
Matrix gram_plus_identity(const Matrix& x_c, const Vector& d) {
  const std::size_t p = x_c.rows();
  const std::size_t n = x_c.cols();
  Matrix scaled(p, n);
  const auto& k = simd::kernels();
  for (std::size_t mu = 0; mu < p; ++mu) k.mul(x_c.row(mu).data(), d.data(), scaled.row(mu).data(), n);

  Matrix a(p, p);
  double out[4];
  for (std::size_t mu = 0; mu < p; ++mu) {
    const double* s = scaled.row(mu).data();
    std::size_t nu = mu;
    for (; nu + 4 <= p; nu += 4) {
      k.dot4(s, x_c.row(nu).data(), x_c.row(nu + 1).data(), x_c.row(nu + 2).data(),
             x_c.row(nu + 3).data(), n, out);
      for (int t = 0; t < 4; ++t) a(mu, nu + t) = out[t];
    }
    for (; nu < p; ++nu) a(mu, nu) = k.dot(s, x_c.row(nu).data(), n);
    a(mu, mu) += 1.0;
    for (nu = mu + 1; nu < p; ++nu) a(nu, mu) = a(mu, nu);
  }
  return a;
}

}  // namespace

Matrix dual_matrix(const Vector& m, const Matrix& x_c, const Vector& chi_diag) {
  const std::size_t n = x_c.cols();
  if (m.size() != n || chi_diag.size() != n)
    throw std::invalid_argument("dual_matrix: dimension mismatch");
  const double inv_p = 1.0 / static_cast<double>(x_c.rows());
  Vector d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (chi_diag[i] > 0.0) d[i] = m[i] / (1.0 - m[i]) / chi_diag[i] * inv_p;
  return gram_plus_identity(x_c, d);
}

DualSolve dual_solve(const SufficientStats& stats, const Matrix& x_c, const Vector& y_c,
                     const Vector& m, double beta_cap) {
  const std::size_t p = x_c.rows();
  const std::size_t n = x_c.cols();
  if (y_c.size() != p || stats.n != n || m.size() != n)
    throw std::invalid_argument("dual_solve: dimension mismatch");
  const double inv_p = 1.0 / static_cast<double>(p);

  // Features with m_i near 1 give A eigenvalues of order 1/(1-m_i), and solving
  // with A directly loses the small components of y_hat that w depends on. They
  // are eliminated instead: with B the matrix built from the remaining features
  // and v_S = m_S w_S,
  //   (diag((1-m)chi/m) + X_S^T B^-1 X_S / p) v_S = X_S^T B^-1 y / p,
  //   y_hat = B^-1 (y - X_S v_S).
  std::vector<std::size_t> strong;
  Vector d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(stats.chi_diag[i] > 0.0)) continue;
    if (m[i] > 0.5)
      strong.push_back(i);
    else
      d[i] = m[i] / (1.0 - m[i]) / stats.chi_diag[i] * inv_p;
  }
  const CholeskyDecomposition b_chol(gram_plus_identity(x_c, d));

  DualSolve r;
  r.y_hat = b_chol.solve(y_c);
  Vector v_strong;
  if (!strong.empty()) {
    const std::size_t s = strong.size();
    std::vector<Vector> xs(s), z(s);
    for (std::size_t a = 0; a < s; ++a) {
      xs[a] = x_c.column(strong[a]);
      z[a] = b_chol.solve(xs[a]);
    }
    Matrix k(s, s);
    Vector rhs(s);
    for (std::size_t a = 0; a < s; ++a) {
      const std::size_t i = strong[a];
      rhs[a] = simd::dot(xs[a], r.y_hat) * inv_p;
      for (std::size_t c = a; c < s; ++c) k(a, c) = k(c, a) = simd::dot(xs[a], z[c]) * inv_p;
      k(a, a) += (1.0 - m[i]) * stats.chi_diag[i] / m[i];
    }
    v_strong = solve_cholesky(std::move(k), rhs);
    for (std::size_t a = 0; a < s; ++a) simd::axpy(-v_strong[a], z[a], r.y_hat);
  }

  const double inv_beta = simd::dot(r.y_hat, y_c) * inv_p;
  if (inv_beta > std::max(1.0 / beta_cap, kResidualFloor * stats.sigma_y2)) {
    r.beta = 1.0 / inv_beta;
  } else {
    r.beta = beta_cap;
    r.beta_capped = true;
  }
  r.lambda = r.y_hat;
  for (double& l : r.lambda) l *= r.beta;

  // w_i = sum_mu lambda^mu x_i^mu / (beta p chi_ii (1 - m_i)); beta cancels
  // against lambda = beta y_hat, so work with y_hat directly.
  r.w = multiply_transposed(x_c, r.y_hat);
  for (std::size_t i = 0; i < n; ++i)
    r.w[i] = stats.chi_diag[i] > 0.0 ? r.w[i] * inv_p / (stats.chi_diag[i] * (1.0 - m[i])) : 0.0;
  for (std::size_t a = 0; a < strong.size(); ++a) r.w[strong[a]] = v_strong[a] / m[strong[a]];
  return r;
}

double dual_free_energy(const VgState& s, const SufficientStats& stats, const CenteredDataset& data,
                        double m_clip) {
  Vector v(stats.n);
  for (std::size_t i = 0; i < stats.n; ++i) v[i] = s.m[i] * s.w[i];
  Vector resid = multiply(data.x_c, v);
  for (std::size_t mu = 0; mu < resid.size(); ++mu) resid[mu] -= data.y_c[mu];
  const double fit = simd::sum_sq(resid) / static_cast<double>(stats.p);
  return free_energy_from_fit(s, stats, fit, m_clip);
}

VgSolution solve_dual(const CenteredDataset& data, const SufficientStats& stats, double gamma,
                      const Vector& m_init, const SolveOptions& opts) {
  if (data.samples() != stats.p || data.features() != stats.n)
    throw std::invalid_argument("solve_dual: data and statistics disagree");
  auto inner = [&](const Vector& m) {
    const DualSolve d = dual_solve(stats, data.x_c, data.y_c, m, opts.beta_cap);
    return detail::InnerSolve{d.w, d.beta, d.beta_capped};
  };
  auto energy = [&](const VgState& s) { return dual_free_energy(s, stats, data, opts.m_clip); };
  return detail::iterate_fixed_point(stats, gamma, m_init, opts, inner, energy);
}

}  // namespace vg
