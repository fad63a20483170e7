#pragma once
// Closed-form analysis for orthogonal designs (chi = I): the exact MAP
// support, the univariate fixed-point equation and its bistable region.

#include <iosfwd>
#include <utility>
#include <vector>

#include "vgarrote/linalg.hpp"

namespace vg {

struct OrthogonalSolution {
  std::vector<bool> s;
  std::size_t k = 0;
  double beta = 0.0;
  double log_score = 0.0;
  /// Growth stopped because the explained variance reached sigma_y2.
  bool saturated = false;
};

/// Exact MAP for chi = I: take features in decreasing b_i^2 (ties by index)
/// and stop at the first k with (beta p / 2) b_{k+1}^2 + gamma < 0.
OrthogonalSolution exact_map_orthogonal(const Vector& b, double sigma_y2, double gamma, std::size_t p,
                                        double beta_cap = 1e12);

/// Global maximizer of orthogonal_log_score over all 2^n supports. The greedy
/// stopping rule above linearizes the gain of adding a feature,
/// -(p/2) log(1 - beta b^2) ~ (beta p / 2) b^2, and can stop early or late
/// when that gain is not small; this scores every prefix of the sorted order
/// instead, which is exact. Ties keep the smaller support.
OrthogonalSolution best_support_orthogonal(const Vector& b, double sigma_y2, double gamma, std::size_t p);

/// log score L = (p/2) log beta + sum_i s_i (beta p b_i^2 / 2 + gamma) - beta p sigma_y2 / 2
/// with 1/beta = sigma_y2 - sum_i s_i b_i^2.
double orthogonal_log_score(const std::vector<bool>& s, const Vector& b, double sigma_y2, double gamma,
                            std::size_t p);

enum class Stability { stable, unstable };

struct FixedPoint {
  double m = 0.0;
  Stability stability = Stability::stable;
  double slope = 0.0;  // f'(m)
};

/// f(m) = sigma(gamma + (p/2) rho / (1 - rho m - delta))
double univariate_map(double m, double rho, double gamma, std::size_t p, double delta = 0.0);

/// Profile free energy of a single feature with w and beta at their optimum,
/// up to an additive constant: -gamma m + m log m + (1-m) log(1-m) + (p/2) log(1 - rho m - delta).
double univariate_free_energy(double m, double rho, double gamma, std::size_t p, double delta = 0.0);

/// All roots of f(m) = m in (0,1), ascending. Roots are bracketed on a dense
/// grid in logit(m) over the interval that provably contains them and refined
/// by bisection.
std::vector<FixedPoint> univariate_fixed_points(double rho, double gamma, std::size_t p,
                                                double delta = 0.0);

/// Root with the lowest univariate_free_energy.
FixedPoint lowest_free_energy_root(double rho, double gamma, std::size_t p, double delta = 0.0);

/// Critical squared correlation (4/p)(1-delta)(sqrt(1+p/2) - 1).
double rho_star(std::size_t p, double delta = 0.0);
/// Large-p approximation 2 sqrt(2/p) (1-delta).
double rho_star_approx(std::size_t p, double delta = 0.0);
/// -sqrt(2p) (1-delta)
double gamma_star(std::size_t p, double delta = 0.0);

struct PhaseBoundary {
  double rho = 0.0;
  double a = 0.0;
  double b = 0.0;
  double D = 0.0;
  double m1 = 0.0;  // smaller tangency root
  double m2 = 0.0;
  double gamma_lower = 0.0;  // gamma_2
  double gamma_upper = 0.0;  // gamma_1
};

/// Tangency analysis at rho; throws std::invalid_argument when rho < rho*
/// (no bistable band). At rho == rho* the band has zero width.
PhaseBoundary phase_boundary(double rho, std::size_t p, double delta = 0.0);

/// (gamma_2, gamma_1): two stable solutions coexist for gamma strictly inside.
std::pair<double, double> bistable_gamma_range(double rho, std::size_t p, double delta = 0.0);

enum class Phase { unique_low, unique_high, bistable };

struct PhaseCell {
  double rho = 0.0;
  double gamma = 0.0;
  Phase phase = Phase::unique_low;
  std::size_t roots = 1;
};

struct BoundaryPoint {
  double rho = 0.0;
  double gamma_lower = 0.0;  // NaN below rho*
  double gamma_upper = 0.0;  // NaN below rho*
  double gamma_half = 0.0;   // gamma with m = 1/2 a fixed point; NaN above rho*
  double gamma_exact = 0.0;  // exact MAP switch, -p rho / (2 (1 - delta))
};

struct PhaseDiagram {
  std::size_t p = 0;
  double delta = 0.0;
  double rho_star = 0.0;
  double rho_star_approx = 0.0;
  double gamma_star = 0.0;
  std::vector<PhaseCell> cells;
  std::vector<BoundaryPoint> boundary;
};

PhaseDiagram phase_diagram(std::size_t p, const Vector& rho_grid, const Vector& gamma_grid,
                           double delta = 0.0);

const char* to_string(Phase ph);

struct ShrinkageRow {
  double w = 0.0;
  double ols = 0.0;
  double ridge = 0.0;
  double lasso = 0.0;
  double garrote = 0.0;
  double vg = 0.0;
};

/// Univariate estimates for data y = w x + noise with <x^2> = 1 and noise
/// variance `noise_var`: ridge = lambda w, lasso = (w - gamma)^+, garrote =
/// (1 - gamma / w^2)^+ w and VG = m w with m the lowest-F fixed point at
/// rho = w^2 / (w^2 + noise_var).
std::vector<ShrinkageRow> univariate_shrinkage_curves(const Vector& w_grid, double gamma_vg,
                                                      std::size_t p, double noise_var,
                                                      double lambda_ridge, double gamma_lasso,
                                                      double gamma_garrote);

void write_phase_cells(std::ostream& out, const PhaseDiagram& d);
void write_phase_boundary(std::ostream& out, const PhaseDiagram& d);
void write_shrinkage(std::ostream& out, const std::vector<ShrinkageRow>& rows);

}  // namespace vg
