#pragma once
// Primal variational solver: free energy, fixed-point updates for the
// selector means m, weights w and noise precision beta, and the damped
// iteration that alternates them at fixed sparsity log-odds gamma.

#include <functional>
#include <string>

#include "vgarrote/data.hpp"

namespace vg {

/// Residual variance below this fraction of var(y) is round-off from an
/// interpolating fit and is treated like a capped beta.
inline constexpr double kResidualFloor = 1e-9;

struct SolveOptions {
  double tol = 1e-7;
  std::size_t max_iter = 10000;
  double m_clip = 1e-12;
  double eta_jump_threshold = 0.1;
  double beta_cap = 1e12;

  /// Throws std::invalid_argument when out of range.
  void validate() const;
};

struct VgState {
  Vector m;
  Vector w;
  double beta = 1.0;
  double gamma = 0.0;
  double eta = 1.0;
};

struct VgSolution {
  Vector m;
  Vector w;
  double beta = 0.0;
  double gamma = 0.0;
  double free_energy = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  /// Explained variance reached the output variance; beta sits at beta_cap.
  bool beta_capped = false;
  /// Set when a linear solve broke down; free_energy is then +inf.
  std::string failure;

  VgState state() const { return {m, w, beta, gamma, 1.0}; }
};

struct FreeEnergyGradient {
  Vector dm;
  Vector dw;
  double dbeta = 0.0;
};

/// Variational free energy at (m, w, beta, gamma). Needs stats.chi unless the
/// caller supplies the data-fit term through free_energy_from_fit.
double free_energy(const VgState& s, const SufficientStats& stats, double m_clip = 1e-12);

/// Same as free_energy with the data-fit term
///   fit = sum_ij v_i v_j chi_ij - 2 sum_i v_i b_i + sigma_y2   (v = m*w)
/// supplied by the caller, e.g. as a residual mean square.
double free_energy_from_fit(const VgState& s, const SufficientStats& stats, double fit,
                            double m_clip = 1e-12);

FreeEnergyGradient free_energy_gradient(const VgState& s, const SufficientStats& stats);

/// Largest stationarity violation: |dF/dw_i|, |dF/dbeta| and |m_i(1-m_i) dF/dm_i|.
/// The m part is the gradient in logit coordinates, which stays bounded when m
/// sits at the clip limits.
double stationarity_residual(const VgState& s, const SufficientStats& stats);

/// The matrix chi'_ij = chi_ij m_j + (1-m_j) chi_jj delta_ij (not symmetric).
Matrix variational_covariance(const Vector& m, const SufficientStats& stats);

/// Solves chi' w = b (via Cholesky on v = m*w); throws SingularMatrixError on breakdown.
Vector w_update(const Vector& m, const SufficientStats& stats);

struct BetaUpdate {
  double beta = 0.0;
  bool capped = false;
};
BetaUpdate beta_update(const Vector& m, const Vector& w, const SufficientStats& stats,
                       double beta_cap = 1e12);

/// sigma(gamma + beta p/2 w_i^2 chi_ii), clipped to [m_clip, 1-m_clip].
Vector m_proposal(const VgState& s, const SufficientStats& stats, double m_clip = 1e-12);

VgSolution solve_primal(const SufficientStats& stats, double gamma, const Vector& m_init,
                        const SolveOptions& opts = {});

/// y = sum_i m_i w_i (x_i - mean_i) + y_mean for every row of x_new.
Vector predict(const VgSolution& sol, const Matrix& x_new, const Vector& x_mean, double y_mean);

Vector solution_vector(const VgSolution& sol);

std::string to_json(const VgSolution& sol, int indent = 2);
VgSolution solution_from_json(const std::string& text);

namespace detail {

struct InnerSolve {
  Vector w;
  double beta = 0.0;
  bool beta_capped = false;
};

/// Damped fixed-point loop shared by the primal and dual paths. `inner`
/// returns (w, beta) for a given m; `energy` evaluates F at the final state.
VgSolution iterate_fixed_point(const SufficientStats& stats, double gamma, const Vector& m_init,
                               const SolveOptions& opts,
                               const std::function<InnerSolve(const Vector&)>& inner,
                               const std::function<double(const VgState&)>& energy);

}  // namespace detail

}  // namespace vg
