#pragma once
// The gamma-grid driver: forward and backward warm-started passes, per-gamma
// selection of the lower free energy branch, and validation-based choice of
// the sparsity level.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "vgarrote/vg_core.hpp"

namespace vg {

enum class SolverKind { automatic, primal, dual };

/// Primal when n < p, dual otherwise (including n == p).
SolverKind resolve_solver(SolverKind requested, std::size_t n, std::size_t p);

struct GammaSchedule {
  double gamma_min = -20.0;
  double gamma_max = 0.0;
  double delta_gamma = 0.4;
  double epsilon = 0.001;
  /// The data gave gamma_min >= 0 and the fixed [-20, 0] grid was used.
  bool fallback = false;

  /// gamma_min + k * delta_gamma up to the first point >= gamma_max (within
  /// rounding of the last step).
  Vector grid() const;
  void validate() const;
};

/// Most negative over features of -p b_i^2 / (2 sigma_y2 chi_ii) + logit(eps),
/// i.e. the largest gamma at which every m_i starts near eps.
double gamma_min(const SufficientStats& stats, double epsilon);

/// gamma_max = 0.02 gamma_min, step = -0.02 gamma_min.
GammaSchedule default_schedule(const SufficientStats& stats, double epsilon);

struct PathOptions {
  SolveOptions solve;
  SolverKind solver = SolverKind::automatic;
  /// Start the forward pass from uniform random m instead of eps.
  bool random_init = false;
  std::uint64_t init_seed = 0;
};

struct GammaPath {
  Vector grid;
  std::vector<VgSolution> forward;
  std::vector<VgSolution> backward;
  std::vector<VgSolution> selected;
  std::vector<bool> selected_forward;  // which branch selected[g] came from
  Vector train_mse;
  Vector val_mse;
  std::size_t best_index = 0;
  SolverKind solver = SolverKind::primal;
};

/// Runs both passes over `schedule` for the centered training data; the
/// validation set is raw (uncentered) and scored with the training means.
GammaPath run_path(const CenteredDataset& train, const SufficientStats& stats, const Dataset& val,
                   const GammaSchedule& schedule, const PathOptions& opts = {});
GammaPath run_path(const CenteredDataset& train, const Dataset& val, const GammaSchedule& schedule,
                   const PathOptions& opts = {});

struct FitOptions {
  PathOptions path;
  double epsilon = 0.001;
  /// Overrides for the default schedule.
  std::optional<double> gamma_min;
  std::optional<double> gamma_max;
  std::optional<double> gamma_step;
};

struct FitResult {
  VgSolution best;
  GammaPath path;
  GammaSchedule schedule;
  Vector x_mean;
  double y_mean = 0.0;

  Vector predict(const Matrix& x) const { return vg::predict(best, x, x_mean, y_mean); }
};

FitResult fit(const Dataset& train, const Dataset& val, const FitOptions& opts = {});

/// Columns: gamma, F_forward, F_backward, F_selected, train_mse, val_mse.
void write_path_table(std::ostream& out, const GammaPath& path);

}  // namespace vg
