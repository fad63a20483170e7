#include "vgarrote/exact_orthogonal.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "vgarrote/math.hpp"

namespace vg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_univariate_domain(double rho, double delta) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0,1)");
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0,1)");
  if (!(rho + delta < 1.0)) throw std::invalid_argument("rho + delta must be < 1");
}

// f'(m) evaluated at a fixed point, where f(m) = m.
double slope_at(double m, double rho, std::size_t p, double delta) {
  const double denom = 1.0 - rho * m - delta;
  return m * (1.0 - m) * 0.5 * static_cast<double>(p) * rho * rho / (denom * denom);
}

}  // namespace

double orthogonal_log_score(const std::vector<bool>& s, const Vector& b, double sigma_y2, double gamma,
                            std::size_t p) {
  double explained = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (s[i]) {
      explained += b[i] * b[i];
      count += 1.0;
    }
  const double inv_beta = sigma_y2 - explained;
  if (!(inv_beta > 0.0)) return std::numeric_limits<double>::infinity();
  const double beta = 1.0 / inv_beta;
  const double pd = static_cast<double>(p);
  return 0.5 * pd * std::log(beta) + 0.5 * beta * pd * explained + gamma * count -
         0.5 * beta * pd * sigma_y2;
}

OrthogonalSolution exact_map_orthogonal(const Vector& b, double sigma_y2, double gamma, std::size_t p,
                                        double beta_cap) {
  if (!(sigma_y2 > 0.0)) throw std::invalid_argument("sigma_y2 must be positive");
  const std::size_t n = b.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return b[x] * b[x] > b[y] * b[y]; });

  OrthogonalSolution sol;
  sol.s.assign(n, false);
  const double half_p = 0.5 * static_cast<double>(p);
  double explained = 0.0;
  sol.beta = 1.0 / sigma_y2;
  while (sol.k < n) {
    const double bk = b[order[sol.k]];
    if (sol.beta * half_p * bk * bk + gamma < 0.0) break;
    explained += bk * bk;
    sol.s[order[sol.k]] = true;
    ++sol.k;
    const double inv_beta = sigma_y2 - explained;
    if (!(inv_beta > 1.0 / beta_cap)) {
      sol.beta = beta_cap;
      sol.saturated = true;
      break;
    }
    sol.beta = 1.0 / inv_beta;
  }
  sol.log_score = sol.saturated ? std::numeric_limits<double>::infinity()
                                : orthogonal_log_score(sol.s, b, sigma_y2, gamma, p);
  return sol;
}

OrthogonalSolution best_support_orthogonal(const Vector& b, double sigma_y2, double gamma, std::size_t p) {
  if (!(sigma_y2 > 0.0)) throw std::invalid_argument("sigma_y2 must be positive");
  const std::size_t n = b.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return b[x] * b[x] > b[y] * b[y]; });

  // L = -(p/2) log(sigma_y2 - explained) + k gamma - p/2, so for each k the
  // k largest b_i^2 are optimal and only the n+1 prefixes need scoring.
  OrthogonalSolution best;
  best.s.assign(n, false);
  best.log_score = orthogonal_log_score(best.s, b, sigma_y2, gamma, p);
  std::vector<bool> s(n, false);
  for (std::size_t k = 1; k <= n; ++k) {
    s[order[k - 1]] = true;
    const double score = orthogonal_log_score(s, b, sigma_y2, gamma, p);
    if (score > best.log_score) {
      best.s = s;
      best.k = k;
      best.log_score = score;
    }
  }
  double explained = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (best.s[i]) explained += b[i] * b[i];
  best.saturated = !(sigma_y2 - explained > 0.0);
  best.beta = best.saturated ? std::numeric_limits<double>::infinity() : 1.0 / (sigma_y2 - explained);
  return best;
}

double univariate_map(double m, double rho, double gamma, std::size_t p, double delta) {
  return logistic(gamma + 0.5 * static_cast<double>(p) * rho / (1.0 - rho * m - delta));
}

double univariate_free_energy(double m, double rho, double gamma, std::size_t p, double delta) {
  return -gamma * m + binary_neg_entropy(m) +
         0.5 * static_cast<double>(p) * std::log(1.0 - rho * m - delta);
}

std::vector<FixedPoint> univariate_fixed_points(double rho, double gamma, std::size_t p, double delta) {
  check_univariate_domain(rho, delta);
  const double half_p = 0.5 * static_cast<double>(p);
  // In x = logit(m) the fixed-point condition is h(x) = 0 with h decreasing
  // overall and bounded between two unit-slope lines, so every root lies in
  // [gamma + half_p rho/(1-delta), gamma + half_p rho/(1-rho-delta)].
  auto h = [&](double x) { return gamma + half_p * rho / (1.0 - rho * logistic(x) - delta) - x; };
  const double x_lo = gamma + half_p * rho / (1.0 - delta) - 1.0;
  const double x_hi = gamma + half_p * rho / (1.0 - rho - delta) + 1.0;
  const std::size_t segments =
      std::max<std::size_t>(10000, static_cast<std::size_t>(std::ceil((x_hi - x_lo) * 200.0)));
  const double dx = (x_hi - x_lo) / static_cast<double>(segments);

  std::vector<FixedPoint> roots;
  auto add_root = [&](double x) {
    FixedPoint fp;
    fp.m = logistic(x);
    fp.slope = slope_at(fp.m, rho, p, delta);
    fp.stability = fp.slope < 1.0 ? Stability::stable : Stability::unstable;
    roots.push_back(fp);
  };

  double xa = x_lo;
  double ha = h(xa);
  for (std::size_t k = 1; k <= segments; ++k) {
    const double xb = x_lo + static_cast<double>(k) * dx;
    const double hb = h(xb);
    if (ha == 0.0) {
      add_root(xa);
    } else if ((ha < 0.0) != (hb < 0.0) && hb != 0.0) {
      double lo = xa, hi = xb, hlo = ha;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double hm = h(mid);
        if ((hm < 0.0) == (hlo < 0.0)) {
          lo = mid;
          hlo = hm;
        } else {
          hi = mid;
        }
        if (std::abs(logistic(hi) - logistic(lo)) <= 1e-12 && hi - lo <= 1e-12 * std::max(1.0, std::abs(lo)))
          break;
      }
      add_root(0.5 * (lo + hi));
    }
    xa = xb;
    ha = hb;
  }
  if (ha == 0.0) add_root(xa);
  return roots;
}

FixedPoint lowest_free_energy_root(double rho, double gamma, std::size_t p, double delta) {
  const auto roots = univariate_fixed_points(rho, gamma, p, delta);
  FixedPoint best = roots.front();
  double best_f = univariate_free_energy(best.m, rho, gamma, p, delta);
  for (const auto& r : roots) {
    const double f = univariate_free_energy(r.m, rho, gamma, p, delta);
    if (f < best_f) {
      best_f = f;
      best = r;
    }
  }
  return best;
}

double rho_star(std::size_t p, double delta) {
  const double pd = static_cast<double>(p);
  return 4.0 / pd * (1.0 - delta) * (std::sqrt(1.0 + 0.5 * pd) - 1.0);
}

double rho_star_approx(std::size_t p, double delta) {
  return 2.0 * std::sqrt(2.0 / static_cast<double>(p)) * (1.0 - delta);
}

double gamma_star(std::size_t p, double delta) {
  return -std::sqrt(2.0 * static_cast<double>(p)) * (1.0 - delta);
}

PhaseBoundary phase_boundary(double rho, std::size_t p, double delta) {
  check_univariate_domain(rho, delta);
  const double half_p = 0.5 * static_cast<double>(p);
  const double c = (1.0 - delta) * (1.0 - delta);
  PhaseBoundary pb;
  pb.rho = rho;
  pb.a = (1.0 + half_p) * rho * rho;
  pb.b = 2.0 * rho * (1.0 - delta) + half_p * rho * rho;
  pb.D = pb.b * pb.b - 4.0 * pb.a * c;
  if (pb.D < 0.0) {
    // Rounding can push D slightly negative exactly at rho*.
    if (pb.D < -1e-12 * pb.b * pb.b || rho < rho_star(p, delta) * (1.0 - 1e-12))
      throw std::invalid_argument("no bistable band: rho <= rho*");
    pb.D = 0.0;
  }
  const double sq = std::sqrt(pb.D);
  pb.m1 = (pb.b - sq) / (2.0 * pb.a);
  pb.m2 = (pb.b + sq) / (2.0 * pb.a);
  auto gamma_at = [&](double m) { return logit(m) - half_p * rho / (1.0 - rho * m - delta); };
  const double g1 = gamma_at(pb.m1);
  const double g2 = gamma_at(pb.m2);
  pb.gamma_lower = std::min(g1, g2);
  pb.gamma_upper = std::max(g1, g2);
  return pb;
}

std::pair<double, double> bistable_gamma_range(double rho, std::size_t p, double delta) {
  const PhaseBoundary pb = phase_boundary(rho, p, delta);
  return {pb.gamma_lower, pb.gamma_upper};
}

PhaseDiagram phase_diagram(std::size_t p, const Vector& rho_grid, const Vector& gamma_grid, double delta) {
  PhaseDiagram d;
  d.p = p;
  d.delta = delta;
  d.rho_star = rho_star(p, delta);
  d.rho_star_approx = rho_star_approx(p, delta);
  d.gamma_star = gamma_star(p, delta);
  const double half_p = 0.5 * static_cast<double>(p);
  for (double rho : rho_grid) {
    BoundaryPoint bp;
    bp.rho = rho;
    bp.gamma_exact = -half_p * rho / (1.0 - delta);
    if (rho > d.rho_star) {
      const auto [lo, hi] = bistable_gamma_range(rho, p, delta);
      bp.gamma_lower = lo;
      bp.gamma_upper = hi;
      bp.gamma_half = kNaN;
    } else {
      bp.gamma_lower = bp.gamma_upper = kNaN;
      bp.gamma_half = -half_p * rho / (1.0 - 0.5 * rho - delta);
    }
    d.boundary.push_back(bp);
    for (double gamma : gamma_grid) {
      const auto roots = univariate_fixed_points(rho, gamma, p, delta);
      PhaseCell cell{rho, gamma, Phase::unique_low, roots.size()};
      if (roots.size() >= 2)
        cell.phase = Phase::bistable;
      else
        cell.phase = roots.front().m < 0.5 ? Phase::unique_low : Phase::unique_high;
      d.cells.push_back(cell);
    }
  }
  return d;
}

const char* to_string(Phase ph) {
  switch (ph) {
    case Phase::unique_low: return "unique-low";
    case Phase::unique_high: return "unique-high";
    case Phase::bistable: return "bistable";
  }
  return "unique-low";
}

std::vector<ShrinkageRow> univariate_shrinkage_curves(const Vector& w_grid, double gamma_vg,
                                                      std::size_t p, double noise_var,
                                                      double lambda_ridge, double gamma_lasso,
                                                      double gamma_garrote) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("noise variance must be positive");
  std::vector<ShrinkageRow> rows;
  rows.reserve(w_grid.size());
  for (double w : w_grid) {
    if (w < 0.0) throw std::invalid_argument("shrinkage curves take nonnegative w");
    ShrinkageRow r;
    r.w = w;
    r.ols = w;
    r.ridge = lambda_ridge * w;
    r.lasso = std::max(0.0, w - gamma_lasso);
    r.garrote = w > 0.0 ? std::max(0.0, 1.0 - gamma_garrote / (w * w)) * w : 0.0;
    const double rho = w * w / (w * w + noise_var);
    r.vg = lowest_free_energy_root(rho, gamma_vg, p).m * w;
    rows.push_back(r);
  }
  return rows;
}

void write_phase_cells(std::ostream& out, const PhaseDiagram& d) {
  out << "# rho\tgamma\tphase\troots\n" << std::setprecision(10);
  for (const auto& c : d.cells)
    out << c.rho << '\t' << c.gamma << '\t' << to_string(c.phase) << '\t' << c.roots << '\n';
}

void write_phase_boundary(std::ostream& out, const PhaseDiagram& d) {
  out << std::setprecision(10);
  out << "# p=" << d.p << " delta=" << d.delta << " rho_star_exact=" << d.rho_star
      << " rho_star_approx=" << d.rho_star_approx << " gamma_star=" << d.gamma_star << '\n';
  out << "# rho\tgamma_lower\tgamma_upper\tgamma_half\tgamma_exact\trho_star_exact\trho_star_approx\n";
  for (const auto& b : d.boundary)
    out << b.rho << '\t' << b.gamma_lower << '\t' << b.gamma_upper << '\t' << b.gamma_half << '\t'
        << b.gamma_exact << '\t' << d.rho_star << '\t' << d.rho_star_approx << '\n';
}

void write_shrinkage(std::ostream& out, const std::vector<ShrinkageRow>& rows) {
  out << "# w\tols\tridge\tlasso\tgarrote\tvg\n" << std::setprecision(10);
  for (const auto& r : rows)
    out << r.w << '\t' << r.ols << '\t' << r.ridge << '\t' << r.lasso << '\t' << r.garrote << '\t' << r.vg
        << '\n';
}

}  // namespace vg
