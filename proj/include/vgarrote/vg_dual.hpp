#pragma once
// Sample-space formulation of the fixed-point equations. Each iteration
// factors a p x p matrix instead of the n x n chi', which pays off when the
// number of features exceeds the number of samples.

#include "vgarrote/vg_core.hpp"

namespace vg {

/// A_{mu nu} = delta_{mu nu} + (1/p) sum_i m_i/(1-m_i) x_i^mu x_i^nu / chi_ii.
/// Features with chi_ii == 0 are skipped. The result is exactly symmetric.
Matrix dual_matrix(const Vector& m, const Matrix& x_c, const Vector& chi_diag);

struct DualSolve {
  double beta = 0.0;
  Vector lambda;  // Lagrange multipliers, beta * y_hat
  Vector y_hat;   // solution of A y_hat = y
  Vector w;
  bool beta_capped = false;
};

DualSolve dual_solve(const SufficientStats& stats, const Matrix& x_c, const Vector& y_c,
                     const Vector& m, double beta_cap = 1e12);

/// Free energy evaluated from residuals, O(n p), without forming chi.
double dual_free_energy(const VgState& s, const SufficientStats& stats, const CenteredDataset& data,
                        double m_clip = 1e-12);

VgSolution solve_dual(const CenteredDataset& data, const SufficientStats& stats, double gamma,
                      const Vector& m_init, const SolveOptions& opts = {});

}  // namespace vg
