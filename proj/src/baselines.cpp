#include "vgarrote/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vgarrote/errors.hpp"
#include "vgarrote/metrics.hpp"
#include "vgarrote/simd.hpp"

namespace vg {

std::string to_string(BaselineMethod m) { return m == BaselineMethod::ridge ? "ridge" : "lasso"; }

BaselineSolution ridge_fit(const SufficientStats& stats, double lambda) {
  if (!stats.chi) throw std::invalid_argument("ridge_fit needs the full chi matrix");
  if (!(lambda >= 0.0)) throw std::invalid_argument("ridge lambda must be >= 0");
  Matrix a = *stats.chi;
  for (std::size_t i = 0; i < stats.n; ++i) a(i, i) += lambda;
  BaselineSolution s;
  s.method = BaselineMethod::ridge;
  s.lambda = lambda;
  s.w = solve_cholesky(std::move(a), stats.b);
  return s;
}

BaselineSolution ridge_fit_samples(const CenteredDataset& data, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("sample-space ridge needs lambda > 0");
  const std::size_t p = data.samples();
  const double inv_p = 1.0 / static_cast<double>(p);
  Matrix k(p, p);
  for (std::size_t mu = 0; mu < p; ++mu)
    for (std::size_t nu = mu; nu < p; ++nu)
      k(mu, nu) = k(nu, mu) = simd::dot(data.x_c.row(mu), data.x_c.row(nu)) * inv_p;
  for (std::size_t mu = 0; mu < p; ++mu) k(mu, mu) += lambda;
  const Vector alpha = solve_cholesky(std::move(k), data.y_c);
  BaselineSolution s;
  s.method = BaselineMethod::ridge;
  s.lambda = lambda;
  s.w = multiply_transposed(data.x_c, alpha);
  for (double& v : s.w) v *= inv_p;
  return s;
}

LassoProblem::LassoProblem(const CenteredDataset& data)
    : xt_(data.x_c.transposed()), y_(data.y_c), p_(data.samples()) {
  col_sq_.resize(xt_.rows());
  for (std::size_t i = 0; i < xt_.rows(); ++i)
    col_sq_[i] = simd::sum_sq(xt_.row(i)) / static_cast<double>(p_);
}

double LassoProblem::lambda_max() const {
  double m = 0.0;
  for (std::size_t i = 0; i < xt_.rows(); ++i)
    m = std::max(m, std::abs(simd::dot(xt_.row(i), y_)) / static_cast<double>(p_));
  return m;
}

double LassoProblem::objective(const Vector& w, double lambda) const {
  Vector r = y_;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] != 0.0) simd::axpy(-w[i], xt_.row(i), r);
  double l1 = 0.0;
  for (double v : w) l1 += std::abs(v);
  return 0.5 * simd::sum_sq(r) / static_cast<double>(p_) + lambda * l1;
}

BaselineSolution LassoProblem::solve(double lambda, const Vector* warm, const LassoOptions& opts) const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lasso lambda must be >= 0");
  const std::size_t n = xt_.rows();
  const double inv_p = 1.0 / static_cast<double>(p_);
  BaselineSolution s;
  s.method = BaselineMethod::lasso;
  s.lambda = lambda;
  s.w = warm ? *warm : Vector(n, 0.0);
  if (s.w.size() != n) throw std::invalid_argument("warm start has wrong dimension");

  Vector r = y_;
  for (std::size_t i = 0; i < n; ++i)
    if (s.w[i] != 0.0) simd::axpy(-s.w[i], xt_.row(i), r);

  auto update = [&](std::size_t j) {
    if (col_sq_[j] <= 0.0) {
      s.w[j] = 0.0;
      return 0.0;
    }
    const double old = s.w[j];
    const double z = simd::dot(xt_.row(j), r) * inv_p + col_sq_[j] * old;
    const double mag = std::abs(z) - lambda;
    const double next = mag > 0.0 ? std::copysign(mag, z) / col_sq_[j] : 0.0;
    if (next != old) {
      simd::axpy(old - next, xt_.row(j), r);
      s.w[j] = next;
    }
    return std::abs(next - old);
  };

  std::vector<std::size_t> active;
  s.converged = false;
  while (s.sweeps < opts.max_sweeps) {
    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) change = std::max(change, update(j));
    ++s.sweeps;
    if (change <= opts.tol) {
      s.converged = true;
      break;
    }
    // Iterate on the current support until it settles, then re-check all.
    active.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (s.w[j] != 0.0) active.push_back(j);
    while (s.sweeps < opts.max_sweeps) {
      double c = 0.0;
      for (std::size_t j : active) c = std::max(c, update(j));
      ++s.sweeps;
      if (c <= opts.tol) break;
    }
  }
  return s;
}

BaselineSolution lasso_fit(const CenteredDataset& data, double lambda, const Vector* warm,
                           const LassoOptions& opts) {
  return LassoProblem(data).solve(lambda, warm, opts);
}

Vector default_lambda_grid(const SufficientStats& stats, BaselineMethod method, std::size_t count) {
  if (count < 2) throw std::invalid_argument("lambda grid needs at least 2 points");
  double hi = 0.0, lo = 0.0;
  if (method == BaselineMethod::lasso) {
    for (double b : stats.b) hi = std::max(hi, std::abs(b));
    if (hi <= 0.0) hi = 1.0;
    lo = hi * 1e-4;
  } else {
    double scale = 0.0;
    for (double c : stats.chi_diag) scale += c;
    scale = stats.n ? scale / static_cast<double>(stats.n) : 1.0;
    if (scale <= 0.0) scale = 1.0;
    hi = 1e3 * scale;
    lo = 1e-4 * scale;
  }
  Vector g(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) g[k] = hi * std::exp(-step * static_cast<double>(k));
  g.back() = lo;
  return g;
}

Vector predict_linear(const Vector& w, const Matrix& x, const Vector& x_mean, double y_mean) {
  if (x.cols() != w.size()) throw DataError("prediction inputs have the wrong feature count");
  const double offset = y_mean - simd::dot(w, x_mean);
  Vector y = multiply(x, w);
  for (double& v : y) v += offset;
  return y;
}

Vector BaselineCv::predict(const Matrix& x) const { return predict_linear(best.w, x, x_mean, y_mean); }

BaselineCv baseline_cv(const Dataset& train, const Dataset& val, BaselineMethod method,
                       const Vector& lambda_grid) {
  const CenteredDataset c = center(train);
  const bool sample_space = method == BaselineMethod::ridge && c.features() >= c.samples();
  const SufficientStats stats =
      sufficient_stats(c, method == BaselineMethod::ridge && !sample_space);

  BaselineCv cv;
  cv.lambdas = lambda_grid.empty() ? default_lambda_grid(stats, method) : lambda_grid;
  if (method == BaselineMethod::lasso)
    std::sort(cv.lambdas.begin(), cv.lambdas.end(), std::greater<>());
  cv.x_mean = c.x_mean;
  cv.y_mean = c.y_mean;

  std::optional<LassoProblem> lasso;
  if (method == BaselineMethod::lasso) lasso.emplace(c);
  const Vector zero(c.features(), 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cv.lambdas.size(); ++k) {
    const double lambda = cv.lambdas[k];
    BaselineSolution s;
    if (method == BaselineMethod::lasso)
      s = lasso->solve(lambda, cv.path.empty() ? nullptr : &cv.path.back().w);
    else
      s = sample_space ? ridge_fit_samples(c, lambda) : ridge_fit(stats, lambda);
    cv.train_mse.push_back(mse(predict_linear(s.w, c.x_c, zero, 0.0), c.y_c));
    cv.val_mse.push_back(val.samples() ? mse(predict_linear(s.w, val.x, c.x_mean, c.y_mean), val.y)
                                       : cv.train_mse.back());
    if (cv.val_mse.back() < best) {
      best = cv.val_mse.back();
      cv.best_index = k;
    }
    cv.path.push_back(std::move(s));
  }
  cv.best = cv.path[cv.best_index];
  return cv;
}

}  // namespace vg
