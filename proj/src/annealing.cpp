#include "vgarrote/annealing.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "vgarrote/errors.hpp"
#include "vgarrote/math.hpp"
#include "vgarrote/metrics.hpp"
#include "vgarrote/vg_dual.hpp"

namespace vg {

SolverKind resolve_solver(SolverKind requested, std::size_t n, std::size_t p) {
  if (requested != SolverKind::automatic) return requested;
  return n < p ? SolverKind::primal : SolverKind::dual;
}

void GammaSchedule::validate() const {
  if (!(gamma_min < gamma_max)) throw std::invalid_argument("schedule needs gamma_min < gamma_max");
  if (!(delta_gamma > 0.0)) throw std::invalid_argument("schedule needs a positive gamma step");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 0.5)");
}

Vector GammaSchedule::grid() const {
  validate();
  Vector g;
  const double slack = 1e-9 * delta_gamma;
  for (std::size_t k = 0;; ++k) {
    const double v = gamma_min + static_cast<double>(k) * delta_gamma;
    g.push_back(v);
    if (v >= gamma_max - slack) break;
  }
  return g;
}

double gamma_min(const SufficientStats& stats, double epsilon) {
  if (!(stats.sigma_y2 > 0.0)) throw std::invalid_argument("gamma_min needs sigma_y2 > 0");
  const double p = static_cast<double>(stats.p);
  double worst = 0.0;
  for (std::size_t i = 0; i < stats.n; ++i) {
    if (!stats.is_active(i)) continue;
    worst = std::max(worst, stats.b[i] * stats.b[i] / stats.chi_diag[i]);
  }
  return -p * worst / (2.0 * stats.sigma_y2) + logit(epsilon);
}

GammaSchedule default_schedule(const SufficientStats& stats, double epsilon) {
  GammaSchedule s;
  s.epsilon = epsilon;
  const double g0 = gamma_min(stats, epsilon);
  if (g0 >= 0.0) {
    s.gamma_min = -20.0;
    s.gamma_max = 0.0;
    s.delta_gamma = 0.4;
    s.fallback = true;
    return s;
  }
  s.gamma_min = g0;
  s.gamma_max = 0.02 * g0;
  s.delta_gamma = -0.02 * g0;
  return s;
}

namespace {

VgSolution failed_solution(std::size_t n, double gamma, const Vector& m, const std::string& why) {
  VgSolution s;
  s.m = m;
  s.w.assign(n, 0.0);
  s.beta = 1.0;
  s.gamma = gamma;
  s.free_energy = std::numeric_limits<double>::infinity();
  s.failure = why;
  return s;
}

bool degenerate(const VgSolution& s) { return s.beta_capped || !s.failure.empty(); }

// Lower free energy wins, except that a capped-beta energy is an artefact of the
// cap (the true value is unbounded below) and never beats a finite-noise one.
bool prefer_forward(const VgSolution& f, const VgSolution& b) {
  if (f.beta_capped != b.beta_capped) return !f.beta_capped;
  return f.free_energy <= b.free_energy;
}

}  // namespace

GammaPath run_path(const CenteredDataset& train, const SufficientStats& stats, const Dataset& val,
                   const GammaSchedule& schedule, const PathOptions& opts) {
  const std::size_t n = stats.n;
  if (val.samples() && val.features() != n) throw DataError("validation set has a different feature count");
  GammaPath path;
  path.grid = schedule.grid();
  path.solver = resolve_solver(opts.solver, n, stats.p);
  if (path.solver == SolverKind::primal && !stats.chi)
    throw std::invalid_argument("primal path needs statistics with the full chi matrix");

  auto solve = [&](double gamma, const Vector& m0) -> VgSolution {
    try {
      return path.solver == SolverKind::primal ? solve_primal(stats, gamma, m0, opts.solve)
                                               : solve_dual(train, stats, gamma, m0, opts.solve);
    } catch (const NumericalError& e) {
      return failed_solution(n, gamma, m0, e.what());
    }
  };

  Vector m(n, schedule.epsilon);
  if (opts.random_init) {
    std::mt19937_64 rng(opts.init_seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : m) v = u(rng);
  }

  const std::size_t g = path.grid.size();
  path.forward.reserve(g);
  for (double gamma : path.grid) {
    path.forward.push_back(solve(gamma, m));
    if (path.forward.back().failure.empty()) m = path.forward.back().m;
  }
  // A capped beta means the fit interpolates the training data; that state is
  // absorbing (every m stays at 1), so the backward pass starts from the last
  // forward solution that still has finite noise.
  std::size_t start = g;
  while (start > 0 && degenerate(path.forward[start - 1])) --start;
  if (start == 0) start = g;
  if (start < g) m = path.forward[start - 1].m;
  path.backward.resize(g);
  for (std::size_t k = g; k-- > start;) path.backward[k] = path.forward[k];
  for (std::size_t k = start; k-- > 0;) {
    path.backward[k] = solve(path.grid[k], m);
    if (path.backward[k].failure.empty()) m = path.backward[k].m;
  }

  path.selected.resize(g);
  path.selected_forward.resize(g);
  path.train_mse.resize(g);
  path.val_mse.resize(g);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g; ++k) {
    const VgSolution& f = path.forward[k];
    const VgSolution& b = path.backward[k];
    path.selected_forward[k] = prefer_forward(f, b);
    path.selected[k] = path.selected_forward[k] ? f : b;
    const VgSolution& s = path.selected[k];
    // Training residuals on centered data need no offset.
    const Vector fit_train = predict(s, train.x_c, Vector(n, 0.0), 0.0);
    path.train_mse[k] = mse(fit_train, train.y_c);
    path.val_mse[k] = val.samples() ? mse(predict(s, val.x, train.x_mean, train.y_mean), val.y)
                                    : path.train_mse[k];
    if (!s.failure.empty()) path.val_mse[k] = std::numeric_limits<double>::infinity();
    // Ties go to the larger gamma.
    if (path.val_mse[k] <= best) {
      best = path.val_mse[k];
      path.best_index = k;
    }
  }
  return path;
}

GammaPath run_path(const CenteredDataset& train, const Dataset& val, const GammaSchedule& schedule,
                   const PathOptions& opts) {
  const SolverKind kind = resolve_solver(opts.solver, train.features(), train.samples());
  const SufficientStats stats = sufficient_stats(train, kind == SolverKind::primal);
  return run_path(train, stats, val, schedule, opts);
}

FitResult fit(const Dataset& train, const Dataset& val, const FitOptions& opts) {
  const CenteredDataset c = center(train);
  if (val.samples()) validate(val);
  const SolverKind kind = resolve_solver(opts.path.solver, c.features(), c.samples());
  const SufficientStats stats = sufficient_stats(c, kind == SolverKind::primal);

  FitResult r;
  r.schedule = default_schedule(stats, opts.epsilon);
  if (opts.gamma_min) r.schedule.gamma_min = *opts.gamma_min;
  if (opts.gamma_max) r.schedule.gamma_max = *opts.gamma_max;
  if (opts.gamma_step) r.schedule.delta_gamma = *opts.gamma_step;
  r.schedule.validate();

  r.path = run_path(c, stats, val, r.schedule, opts.path);
  r.best = r.path.selected[r.path.best_index];
  r.x_mean = c.x_mean;
  r.y_mean = c.y_mean;
  return r;
}

void write_path_table(std::ostream& out, const GammaPath& path) {
  out << "# gamma\tF_forward\tF_backward\tF_selected\ttrain_mse\tval_mse\n";
  out << std::setprecision(10);
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    out << path.grid[k] << '\t' << path.forward[k].free_energy << '\t' << path.backward[k].free_energy
        << '\t' << path.selected[k].free_energy << '\t' << path.train_mse[k] << '\t'
        << path.val_mse[k] << '\n';
  }
}

}  // namespace vg
