#pragma once
// Experiment suites over generated instances: VG against ridge and Lasso,
// summarized as mean and sample standard deviation across instances.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vgarrote/annealing.hpp"
#include "vgarrote/generators.hpp"
#include "vgarrote/metrics.hpp"

namespace vg {

struct MethodOutcome {
  EvalReport report;
  Vector v;
  double seconds = 0.0;
};

struct InstanceOutcome {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Vector w_true;
  MethodOutcome vg;
  std::optional<MethodOutcome> ridge;
  std::optional<MethodOutcome> lasso;
  MethodOutcome truth;
  double vg_gamma = 0.0;
  double vg_beta = 0.0;
  Vector vg_m;
};

struct EvalOptions {
  FitOptions vg;
  bool ridge = true;
  bool lasso = true;
  Vector lambda_grid;  // empty: per-method default
};

InstanceOutcome evaluate_instance(const GeneratedInstance& inst, const EvalOptions& opts,
                                  std::size_t index = 0);

/// Evaluates every spec on a pool of `workers` threads (0: hardware
/// concurrency); results come back in spec order.
std::vector<InstanceOutcome> evaluate_all(const std::vector<InstanceSpec>& specs, const EvalOptions& opts,
                                          std::size_t workers = 0);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};
Summary summarize(const std::vector<double>& xs);

struct SuiteRow {
  std::string condition;
  std::string method;
  Summary train_mse, val_mse, test_mse, l1_error, roc_auc, seconds;
  std::optional<Summary> nonzero;
  std::optional<Summary> abs_v3;  // zhao only
};

struct SuiteConfig {
  std::string suite;
  std::size_t instances = 0;  // 0: suite default
  std::uint64_t seed = 1;
  EvalOptions eval;
  std::size_t workers = 0;
  std::size_t sample_sweep_n = 500;
};

struct SuiteResult {
  std::string suite;
  std::vector<SuiteRow> rows;
  std::vector<std::pair<std::string, std::vector<InstanceOutcome>>> raw;  // per condition
};

const std::vector<std::string>& suite_names();
std::size_t default_instances(const std::string& suite);

/// Throws std::invalid_argument for an unknown suite name.
SuiteResult run_suite(const SuiteConfig& cfg);

/// Rows summarizing one condition's outcomes (ridge/lasso/vg/true).
std::vector<SuiteRow> summarize_condition(const std::string& condition,
                                          const std::vector<InstanceOutcome>& outcomes);

/// Summary table without timings, so reruns with the same seed are identical.
void write_suite_table(std::ostream& out, const SuiteResult& r);
/// Mean and sd of wall-clock seconds per condition and method.
void write_suite_timing(std::ostream& out, const SuiteResult& r);
/// One row per instance and method.
void write_suite_instances(std::ostream& out, const SuiteResult& r);

// Spec builders used by the suites.
std::vector<InstanceSpec> example1_specs(std::size_t count, std::uint64_t seed);
std::vector<InstanceSpec> example2_specs(std::size_t count, std::uint64_t seed);
std::vector<InstanceSpec> zhao_specs(char variant, std::size_t count, std::uint64_t seed);
/// n=100, p=100, p_v=20, 20 random unit weights, toeplitz zeta, noise variance s2.
std::vector<InstanceSpec> noise_specs(double zeta, double noise_var, std::size_t count, std::uint64_t seed);
/// n features, p = fraction n, p_v = p/30 (identity) or p/10 (block), given active fraction.
std::vector<InstanceSpec> sample_specs(std::size_t n, double p_fraction, double active_fraction,
                                       Covariance cov, std::size_t count, std::uint64_t seed);
/// Example-2 teacher embedded in n features, p = p_v = 100, noise variance 1/2, identity inputs.
std::vector<InstanceSpec> scaling_specs(std::size_t n, std::size_t count, std::uint64_t seed);

}  // namespace vg
