#include "vgarrote/vg_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "vgarrote/errors.hpp"
#include "vgarrote/math.hpp"
#include "vgarrote/simd.hpp"

namespace vg {
namespace {

const Matrix& require_chi(const SufficientStats& stats) {
  if (!stats.chi) throw std::invalid_argument("primal path needs the full chi matrix");
  return *stats.chi;
}

void check_sizes(const VgState& s, const SufficientStats& stats) {
  if (s.m.size() != stats.n || s.w.size() != stats.n)
    throw std::invalid_argument("state dimension does not match the data");
}

Vector clip_m(Vector m, const SufficientStats& stats, double m_clip) {
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = stats.is_active(i) ? std::clamp(m[i], m_clip, 1.0 - m_clip) : m_clip;
  return m;
}

}  // namespace

void SolveOptions::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter == 0) throw std::invalid_argument("max_iter must be positive");
  if (!(m_clip > 0.0 && m_clip < 0.5)) throw std::invalid_argument("m_clip must lie in (0, 0.5)");
  if (!(eta_jump_threshold > 0.0)) throw std::invalid_argument("eta_jump_threshold must be positive");
  if (!(beta_cap > 0.0)) throw std::invalid_argument("beta_cap must be positive");
}

double free_energy_from_fit(const VgState& s, const SufficientStats& stats, double fit,
                            double m_clip) {
  check_sizes(s, stats);
  if (!(s.beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const double p = static_cast<double>(stats.p);
  double ridge = 0.0;
  double prior = 0.0;
  double entropy = 0.0;
  // Slack for values produced by (1-eta) m + eta q rounding.
  const double lo = m_clip * (1.0 - 1e-9);
  for (std::size_t i = 0; i < stats.n; ++i) {
    const double m = s.m[i];
    if (!(m >= lo && m <= 1.0 - lo))
      throw std::invalid_argument("m_" + std::to_string(i) + " = " + std::to_string(m) +
                                  " outside [m_clip, 1 - m_clip]");
    ridge += m * (1.0 - m) * s.w[i] * s.w[i] * stats.chi_diag[i];
    prior += m;
    entropy += binary_neg_entropy(m);
  }
  return 0.5 * s.beta * p * (fit + ridge) - s.gamma * prior + entropy -
         0.5 * p * std::log(s.beta / (2.0 * std::numbers::pi));
}

double free_energy(const VgState& s, const SufficientStats& stats, double m_clip) {
  check_sizes(s, stats);
  const Matrix& chi = require_chi(stats);
  Vector v(stats.n);
  for (std::size_t i = 0; i < stats.n; ++i) v[i] = s.m[i] * s.w[i];
  const Vector u = multiply(chi, v);
  const double fit = simd::dot(v, u) - 2.0 * simd::dot(v, stats.b) + stats.sigma_y2;
  return free_energy_from_fit(s, stats, fit, m_clip);
}

FreeEnergyGradient free_energy_gradient(const VgState& s, const SufficientStats& stats) {
  check_sizes(s, stats);
  const Matrix& chi = require_chi(stats);
  const std::size_t n = stats.n;
  const double p = static_cast<double>(stats.p);
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = s.m[i] * s.w[i];
  const Vector u = multiply(chi, v);

  FreeEnergyGradient g;
  g.dm.resize(n);
  g.dw.resize(n);
  double fit = simd::dot(v, u) - 2.0 * simd::dot(v, stats.b) + stats.sigma_y2;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = s.m[i], w = s.w[i], c = stats.chi_diag[i];
    fit += m * (1.0 - m) * w * w * c;
    g.dm[i] = 0.5 * s.beta * p * (2.0 * w * u[i] + (1.0 - 2.0 * m) * w * w * c - 2.0 * w * stats.b[i]) -
              s.gamma + logit(m);
    g.dw[i] = s.beta * p * m * (u[i] + (1.0 - m) * w * c - stats.b[i]);
  }
  g.dbeta = 0.5 * p * fit - 0.5 * p / s.beta;
  return g;
}

double stationarity_residual(const VgState& s, const SufficientStats& stats) {
  const FreeEnergyGradient g = free_energy_gradient(s, stats);
  double r = std::abs(g.dbeta);
  for (std::size_t i = 0; i < stats.n; ++i) {
    if (!stats.is_active(i)) continue;
    r = std::max(r, std::abs(g.dw[i]));
    r = std::max(r, std::abs(s.m[i] * (1.0 - s.m[i]) * g.dm[i]));
  }
  return r;
}

Matrix variational_covariance(const Vector& m, const SufficientStats& stats) {
  const Matrix& chi = require_chi(stats);
  const std::size_t n = stats.n;
  if (m.size() != n) throw std::invalid_argument("m has wrong dimension");
  Matrix cp(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = chi.row(i);
    auto dst = cp.row(i);
    simd::kernels().mul(src.data(), m.data(), dst.data(), n);
    dst[i] = chi(i, i) * m[i] + (1.0 - m[i]) * stats.chi_diag[i];
  }
  // Masked features: w_i = 0 through an identity row.
  for (std::size_t i : stats.zero_variance) cp(i, i) = 1.0;
  return cp;
}

Vector w_update(const Vector& m, const SufficientStats& stats) {
  // With v = m*w the system becomes (chi + diag(chi_ii (1-m)/m)) v = b, which
  // is symmetric positive definite, so Cholesky replaces the pivoted LU.
  const Matrix& chi = require_chi(stats);
  const std::size_t n = stats.n;
  if (m.size() != n) throw std::invalid_argument("m has wrong dimension");
  Matrix a = chi;
  Vector rhs = stats.b;
  for (std::size_t i = 0; i < n; ++i) a(i, i) += stats.chi_diag[i] * (1.0 - m[i]) / m[i];
  for (std::size_t i : stats.zero_variance) {
    a(i, i) = 1.0;
    rhs[i] = 0.0;
  }
  Vector w = solve_cholesky(std::move(a), rhs);
  for (std::size_t i = 0; i < n; ++i) w[i] /= m[i];
  return w;
}

BetaUpdate beta_update(const Vector& m, const Vector& w, const SufficientStats& stats,
                       double beta_cap) {
  double explained = 0.0;
  for (std::size_t i = 0; i < stats.n; ++i) explained += m[i] * w[i] * stats.b[i];
  const double inv_beta = stats.sigma_y2 - explained;
  if (!(inv_beta > std::max(1.0 / beta_cap, kResidualFloor * stats.sigma_y2))) return {beta_cap, true};
  return {1.0 / inv_beta, false};
}

Vector m_proposal(const VgState& s, const SufficientStats& stats, double m_clip) {
  const double half_bp = 0.5 * s.beta * static_cast<double>(stats.p);
  Vector q(stats.n);
  for (std::size_t i = 0; i < stats.n; ++i) {
    if (!stats.is_active(i)) {
      q[i] = m_clip;
      continue;
    }
    const double arg = s.gamma + half_bp * s.w[i] * s.w[i] * stats.chi_diag[i];
    q[i] = std::clamp(logistic(arg), m_clip, 1.0 - m_clip);
  }
  return q;
}

namespace detail {

VgSolution iterate_fixed_point(const SufficientStats& stats, double gamma, const Vector& m_init,
                               const SolveOptions& opts,
                               const std::function<InnerSolve(const Vector&)>& inner,
                               const std::function<double(const VgState&)>& energy) {
  opts.validate();
  if (m_init.size() != stats.n) throw std::invalid_argument("m_init has wrong dimension");
  VgState st;
  st.gamma = gamma;
  st.eta = 1.0;
  st.m = clip_m(m_init, stats, opts.m_clip);

  VgSolution sol;
  sol.gamma = gamma;
  InnerSolve in;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    in = inner(st.m);
    st.w = in.w;
    st.beta = in.beta;
    const Vector q = m_proposal(st, stats, opts.m_clip);
    double gap = 0.0;
    for (std::size_t i = 0; i < stats.n; ++i) gap = std::max(gap, std::abs(q[i] - st.m[i]));
    sol.iterations = it;
    if (gap <= opts.tol) {
      sol.converged = true;
      break;
    }
    double step = 0.0;
    for (std::size_t i = 0; i < stats.n; ++i) {
      const double next = (1.0 - st.eta) * st.m[i] + st.eta * q[i];
      step = std::max(step, std::abs(next - st.m[i]));
      st.m[i] = next;
    }
    if (step > opts.eta_jump_threshold) st.eta *= 0.5;
  }
  if (!sol.converged) {
    // Re-solve so (w, beta) belong to the returned m.
    in = inner(st.m);
    st.w = in.w;
    st.beta = in.beta;
  }
  sol.m = st.m;
  sol.w = st.w;
  sol.beta = st.beta;
  sol.beta_capped = in.beta_capped;
  sol.free_energy = energy(st);
  return sol;
}

}  // namespace detail

VgSolution solve_primal(const SufficientStats& stats, double gamma, const Vector& m_init,
                        const SolveOptions& opts) {
  require_chi(stats);
  auto inner = [&](const Vector& m) {
    detail::InnerSolve r;
    r.w = w_update(m, stats);
    const BetaUpdate bu = beta_update(m, r.w, stats, opts.beta_cap);
    r.beta = bu.beta;
    r.beta_capped = bu.capped;
    return r;
  };
  auto energy = [&](const VgState& s) { return free_energy(s, stats, opts.m_clip); };
  return detail::iterate_fixed_point(stats, gamma, m_init, opts, inner, energy);
}

Vector solution_vector(const VgSolution& sol) {
  Vector v(sol.m.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = sol.m[i] * sol.w[i];
  return v;
}

Vector predict(const VgSolution& sol, const Matrix& x_new, const Vector& x_mean, double y_mean) {
  if (x_new.cols() != sol.m.size() || x_mean.size() != sol.m.size())
    throw DataError("prediction inputs have " + std::to_string(x_new.cols()) +
                    " features, model has " + std::to_string(sol.m.size()));
  const Vector v = solution_vector(sol);
  const double offset = y_mean - simd::dot(v, x_mean);
  Vector y = multiply(x_new, v);
  for (double& e : y) e += offset;
  return y;
}

std::string to_json(const VgSolution& sol, int indent) {
  nlohmann::json j;
  j["m"] = sol.m;
  j["w"] = sol.w;
  j["beta"] = sol.beta;
  j["gamma"] = sol.gamma;
  j["free_energy"] = sol.free_energy;
  j["converged"] = sol.converged;
  j["iterations"] = sol.iterations;
  j["beta_capped"] = sol.beta_capped;
  if (!sol.failure.empty()) j["failure"] = sol.failure;
  return j.dump(indent);
}

VgSolution solution_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  VgSolution s;
  s.m = j.at("m").get<Vector>();
  s.w = j.at("w").get<Vector>();
  s.beta = j.at("beta").get<double>();
  s.gamma = j.at("gamma").get<double>();
  s.free_energy = j.at("free_energy").is_null() ? std::numeric_limits<double>::infinity()
                                                : j.at("free_energy").get<double>();
  s.converged = j.at("converged").get<bool>();
  s.iterations = j.at("iterations").get<std::size_t>();
  s.beta_capped = j.value("beta_capped", false);
  s.failure = j.value("failure", std::string{});
  return s;
}

}  // namespace vg
