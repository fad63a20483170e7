#pragma once
// Ridge regression and cyclic coordinate-descent Lasso, each with a
// validation-selected regularization path.

#include <string>
#include <vector>

#include "vgarrote/data.hpp"

namespace vg {

enum class BaselineMethod { ridge, lasso };

std::string to_string(BaselineMethod m);

struct BaselineSolution {
  Vector w;
  double lambda = 0.0;
  BaselineMethod method = BaselineMethod::ridge;
  bool converged = true;
  std::size_t sweeps = 0;
};

/// w = (chi + lambda I)^{-1} b. Throws SingularMatrixError for lambda = 0 with singular chi.
BaselineSolution ridge_fit(const SufficientStats& stats, double lambda);

/// Same estimator through the p x p system, for n >= p:
/// w = X^T (X X^T / p + lambda I)^{-1} y / p.
BaselineSolution ridge_fit_samples(const CenteredDataset& data, double lambda);

struct LassoOptions {
  double tol = 1e-9;  // max coordinate change over a full sweep
  std::size_t max_sweeps = 100000;
};

/// Minimizes (1/2p) sum_mu (y - w.x)^2 + lambda |w|_1 by cyclic coordinate
/// descent with soft-thresholding.
class LassoProblem {
 public:
  explicit LassoProblem(const CenteredDataset& data);

  BaselineSolution solve(double lambda, const Vector* warm = nullptr, const LassoOptions& opts = {}) const;
  /// Smallest lambda with the all-zero solution: max_i |b_i|.
  double lambda_max() const;
  double objective(const Vector& w, double lambda) const;

 private:
  Matrix xt_;  // feature-major copy of x_c
  Vector y_;
  Vector col_sq_;  // chi_ii
  std::size_t p_;
};

BaselineSolution lasso_fit(const CenteredDataset& data, double lambda, const Vector* warm = nullptr,
                           const LassoOptions& opts = {});

/// Lasso: 50 log-spaced values over [lambda_max 1e-4, lambda_max], descending.
/// Ridge: 50 log-spaced values over [1e-4, 1e3] times the mean chi_ii.
Vector default_lambda_grid(const SufficientStats& stats, BaselineMethod method, std::size_t count = 50);

struct BaselineCv {
  BaselineSolution best;
  std::size_t best_index = 0;
  Vector lambdas;
  Vector train_mse;
  Vector val_mse;
  std::vector<BaselineSolution> path;
  Vector x_mean;
  double y_mean = 0.0;

  Vector predict(const Matrix& x) const;
};

/// Fits the whole grid (warm-started for the Lasso) and keeps the solution
/// with the lowest validation MSE. An empty grid selects the default.
BaselineCv baseline_cv(const Dataset& train, const Dataset& val, BaselineMethod method,
                       const Vector& lambda_grid = {});

Vector predict_linear(const Vector& w, const Matrix& x, const Vector& x_mean, double y_mean);

}  // namespace vg
