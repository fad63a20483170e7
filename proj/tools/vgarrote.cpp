// vgarrote: fit, generate, sweep, phase diagrams and benchmark suites.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vgarrote/annealing.hpp"
#include "vgarrote/baselines.hpp"
#include "vgarrote/bench.hpp"
#include "vgarrote/errors.hpp"
#include "vgarrote/exact_orthogonal.hpp"
#include "vgarrote/generators.hpp"
#include "vgarrote/metrics.hpp"
#include "vgarrote/simd.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string val;
  std::string test;
  std::string truth;
  std::string output_dir = ".";
  std::string suite;
  std::size_t instances = 0;
  std::uint64_t seed = 1;
  std::string solver = "auto";
  double epsilon = 0.001;
  std::optional<double> gamma_min, gamma_max, gamma_step;
  double tol = 1e-7;
  std::size_t max_iter = 10000;
  std::string lambda_grid = "auto";
  double val_fraction = 0.5;
  std::size_t threads = 0;
  // phase
  std::size_t p = 100;
  double delta = 0.0;
  double rho_step = 0.01;
  double gamma_lo = -50.0;
  double gamma_hi = 0.0;
  double gamma_cell = 0.5;
  double shrink_gamma = -10.0;
};

vg::SolverKind parse_solver(const std::string& s) {
  if (s == "auto") return vg::SolverKind::automatic;
  if (s == "primal") return vg::SolverKind::primal;
  if (s == "dual") return vg::SolverKind::dual;
  throw UsageError("unknown solver '" + s + "'");
}

vg::Vector parse_lambda_grid(const std::string& s) {
  if (s.empty() || s == "auto") return {};
  vg::Vector out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size() || !(v >= 0.0)) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad --lambda-grid entry '" + tok + "'");
    }
  }
  if (out.empty()) throw UsageError("--lambda-grid is empty");
  return out;
}

vg::FitOptions fit_options(const Options& o) {
  vg::FitOptions f;
  f.epsilon = o.epsilon;
  f.gamma_min = o.gamma_min;
  f.gamma_max = o.gamma_max;
  f.gamma_step = o.gamma_step;
  f.path.solver = parse_solver(o.solver);
  f.path.solve.tol = o.tol;
  f.path.solve.max_iter = o.max_iter;
  try {
    f.path.solve.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(o.epsilon > 0.0 && o.epsilon < 1.0)) throw UsageError("--epsilon must lie in (0, 1)");
  return f;
}

json config_json(const std::string& command, const Options& o) {
  json j;
  j["command"] = command;
  j["seed"] = o.seed;
  j["simd"] = vg::simd::backend_name(vg::simd::active_backend());
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  if (command == "fit" || command == "sweep") {
    j["input"] = o.input;
    j["val"] = o.val;
    j["test"] = o.test;
    j["truth"] = o.truth;
    j["val_fraction"] = o.val_fraction;
  }
  if (command == "fit" || command == "sweep" || command == "bench") {
    j["solver"] = o.solver;
    j["epsilon"] = o.epsilon;
    j["gamma_min"] = opt(o.gamma_min);
    j["gamma_max"] = opt(o.gamma_max);
    j["gamma_step"] = opt(o.gamma_step);
    j["tol"] = o.tol;
    j["max_iter"] = o.max_iter;
    j["lambda_grid"] = o.lambda_grid;
  }
  if (command == "gen" || command == "bench") {
    j["suite"] = o.suite;
    j["instances"] = o.instances;
  }
  if (command == "gen") j["input"] = o.input;
  if (command == "phase") {
    j["p"] = o.p;
    j["delta"] = o.delta;
    j["rho_step"] = o.rho_step;
    j["gamma_range"] = {o.gamma_lo, o.gamma_hi};
    j["gamma_cell"] = o.gamma_cell;
    j["shrinkage_gamma"] = o.shrink_gamma;
  }
  return j;
}

class OutputDir {
 public:
  OutputDir(const std::string& dir, json config) : dir_(dir), config_(std::move(config)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw UsageError("cannot create output directory " + dir);
  }

  // Opens a table file with the reproducibility header already written.
  std::ofstream table(const std::string& name) const {
    std::ofstream out = open(name);
    out << "# vgarrote " << config_["command"].get<std::string>() << '\n';
    out << "# config: " << config_.dump() << '\n';
    return out;
  }

  void write_json(const std::string& name, json body) const {
    body["config"] = config_;
    std::ofstream out = open(name);
    out << body.dump(2) << '\n';
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  std::ofstream open(const std::string& name) const {
    const fs::path path = dir_ / name;
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path.string());
    written_.push_back(path.string());
    return out;
  }

  fs::path dir_;
  json config_;
  mutable std::vector<std::string> written_;
};

struct FitData {
  vg::Dataset train, val, test;
  std::optional<vg::Vector> truth;
};

FitData load_fit_data(const Options& o) {
  if (o.input.empty()) throw UsageError("--input is required");
  FitData d;
  vg::Dataset all = vg::read_dataset_file(o.input);
  vg::validate(all);
  if (!o.val.empty()) {
    d.train = std::move(all);
    d.val = vg::read_dataset_file(o.val);
  } else {
    if (!(o.val_fraction > 0.0 && o.val_fraction < 1.0)) throw UsageError("--val-fraction must lie in (0, 1)");
    const std::size_t n_val = static_cast<std::size_t>(std::lround(o.val_fraction * all.samples()));
    if (n_val < 1 || n_val + 2 > all.samples())
      throw vg::DataError("too few samples to hold out a validation set");
    auto [tr, va, te] = vg::split(all, all.samples() - n_val, n_val, 0, o.seed);
    d.train = std::move(tr);
    d.val = std::move(va);
  }
  if (d.val.features() != d.train.features())
    throw vg::DataError("validation data has a different feature count");
  if (!o.test.empty()) {
    d.test = vg::read_dataset_file(o.test);
    if (d.test.features() != d.train.features()) throw vg::DataError("test data has a different feature count");
  }
  if (!o.truth.empty()) {
    std::ifstream in(o.truth);
    if (!in) throw vg::DataError("cannot open " + o.truth);
    vg::InstanceSpec spec = vg::read_spec(in);
    if (spec.w_true.size() != d.train.features())
      throw vg::DataError("truth has " + std::to_string(spec.w_true.size()) + " weights, data has " +
                          std::to_string(d.train.features()) + " features");
    d.truth = spec.w_true;
  }
  return d;
}

vg::EvalReport evaluate(const vg::Vector& v, const FitData& d,
                        const std::function<vg::Vector(const vg::Matrix&)>& predict) {
  vg::EvalReport r;
  r.train_mse = vg::mse(predict(d.train.x), d.train.y);
  r.val_mse = d.val.samples() ? vg::mse(predict(d.val.x), d.val.y) : NAN;
  r.test_mse = d.test.samples() ? vg::mse(predict(d.test.x), d.test.y) : NAN;
  r.l1_error = NAN;
  r.roc_auc = NAN;
  if (d.truth) {
    r.l1_error = vg::l1_error(v, *d.truth);
    try {
      r.roc_auc = vg::roc_auc(v, *d.truth);
    } catch (const std::invalid_argument&) {
      // All-zero or all-active truth: AUC undefined.
    }
  }
  return r;
}

constexpr const char* kReportHeader = "# method\ttrain_mse\tval_mse\ttest_mse\tnonzero\tl1_error\troc_auc\n";

int cmd_fit(const Options& o) {
  const vg::FitOptions fo = fit_options(o);
  const FitData d = load_fit_data(o);
  const OutputDir out(o.output_dir, config_json("fit", o));

  const vg::FitResult f = vg::fit(d.train, d.val, fo);
  const vg::Vector v = vg::solution_vector(f.best);

  json sol = json::parse(vg::to_json(f.best));
  sol["v"] = v;
  sol["x_mean"] = f.x_mean;
  sol["y_mean"] = f.y_mean;
  sol["solver"] = f.path.solver == vg::SolverKind::primal ? "primal" : "dual";
  sol["schedule"] = {{"gamma_min", f.schedule.gamma_min},
                     {"gamma_max", f.schedule.gamma_max},
                     {"gamma_step", f.schedule.delta_gamma},
                     {"epsilon", f.schedule.epsilon},
                     {"fallback", f.schedule.fallback}};
  out.write_json("fit_solution.json", sol);

  {
    auto t = out.table("fit_path.tsv");
    vg::write_path_table(t, f.path);
  }
  {
    vg::EvalReport r = evaluate(v, d, [&](const vg::Matrix& x) { return f.predict(x); });
    r.nonzero = vg::nonzero_count_vg(f.best.m);
    auto t = out.table("fit_report.tsv");
    t << kReportHeader << std::setprecision(10);
    vg::write_report_row(t, "vg", r);
  }
  for (const auto& p : out.written()) std::cout << p << '\n';
  if (!f.best.converged)
    std::cerr << "warning: selected solution did not converge within " << o.max_iter << " iterations\n";
  return 0;
}

int cmd_sweep(const Options& o) {
  const vg::FitOptions fo = fit_options(o);
  const vg::Vector grid = parse_lambda_grid(o.lambda_grid);
  const FitData d = load_fit_data(o);
  const OutputDir out(o.output_dir, config_json("sweep", o));
  const std::size_t n = d.train.features();

  const vg::FitResult f = vg::fit(d.train, d.val, fo);
  {
    auto t = out.table("vg_path.tsv");
    t << "# gamma\tbranch\tfree_energy\ttrain_mse\tval_mse\tnonzero\tconverged";
    for (std::size_t i = 0; i < n; ++i) t << "\tv" << i + 1;
    t << '\n' << std::setprecision(10);
    for (std::size_t k = 0; k < f.path.grid.size(); ++k) {
      const vg::VgSolution& s = f.path.selected[k];
      t << f.path.grid[k] << '\t' << (f.path.selected_forward[k] ? "forward" : "backward") << '\t' << s.free_energy << '\t'
        << f.path.train_mse[k] << '\t' << f.path.val_mse[k] << '\t' << vg::nonzero_count_vg(s.m) << '\t'
        << s.converged;
      for (double x : vg::solution_vector(s)) t << '\t' << x;
      t << '\n';
    }
  }
  const vg::BaselineCv cv = vg::baseline_cv(d.train, d.val, vg::BaselineMethod::lasso, grid);
  {
    auto t = out.table("lasso_path.tsv");
    t << "# lambda\ttrain_mse\tval_mse\tnonzero\tconverged";
    for (std::size_t i = 0; i < n; ++i) t << "\tw" << i + 1;
    t << '\n' << std::setprecision(10);
    for (std::size_t k = 0; k < cv.lambdas.size(); ++k) {
      const vg::BaselineSolution& s = cv.path[k];
      t << cv.lambdas[k] << '\t' << cv.train_mse[k] << '\t' << cv.val_mse[k] << '\t'
        << vg::nonzero_count_exact(s.w) << '\t' << s.converged;
      for (double x : s.w) t << '\t' << x;
      t << '\n';
    }
  }
  {
    auto t = out.table("sweep_best.tsv");
    t << "# method\tparameter\ttrain_mse\tval_mse\tnonzero\n" << std::setprecision(10);
    t << "vg\t" << f.best.gamma << '\t' << f.path.train_mse[f.path.best_index] << '\t'
      << f.path.val_mse[f.path.best_index] << '\t' << vg::nonzero_count_vg(f.best.m) << '\n';
    t << "lasso\t" << cv.best.lambda << '\t' << cv.train_mse[cv.best_index] << '\t' << cv.val_mse[cv.best_index]
      << '\t' << vg::nonzero_count_exact(cv.best.w) << '\n';
  }
  for (const auto& p : out.written()) std::cout << p << '\n';
  return 0;
}

std::vector<vg::InstanceSpec> gen_specs(const Options& o) {
  const std::size_t count = o.instances ? o.instances : 1;
  if (!o.input.empty()) {
    std::ifstream in(o.input);
    if (!in) throw vg::DataError("cannot open " + o.input);
    const vg::InstanceSpec base = vg::read_spec(in);
    std::vector<vg::InstanceSpec> specs;
    for (std::size_t k = 0; k < count; ++k) {
      vg::InstanceSpec s = base;
      s.seed = vg::derive_seed(o.seed, k);
      specs.push_back(s);
    }
    return specs;
  }
  if (o.suite == "example1") return vg::example1_specs(count, o.seed);
  if (o.suite == "example2") return vg::example2_specs(count, o.seed);
  if (o.suite == "zhao_a") return vg::zhao_specs('a', count, o.seed);
  if (o.suite == "zhao_b") return vg::zhao_specs('b', count, o.seed);
  throw UsageError("gen needs --input SPEC or --suite {example1,example2,zhao_a,zhao_b}");
}

int cmd_gen(const Options& o) {
  const std::vector<vg::InstanceSpec> specs = gen_specs(o);
  const OutputDir out(o.output_dir, config_json("gen", o));
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const vg::GeneratedInstance inst = vg::gen_instance(specs[k]);
    std::ostringstream stem;
    stem << "instance_" << std::setw(3) << std::setfill('0') << k;
    {
      auto t = out.table(stem.str() + "_spec.txt");
      vg::write_spec(t, inst.spec);
    }
    auto write = [&](const char* part, const vg::Dataset& ds) {
      auto t = out.table(stem.str() + "_" + part + ".csv");
      t << "# y,x1..x" << ds.features() << '\n';
      vg::write_dataset(t, ds);
    };
    write("train", inst.train);
    if (inst.val.samples()) write("val", inst.val);
    if (inst.test.samples()) write("test", inst.test);
  }
  for (const auto& p : out.written()) std::cout << p << '\n';
  return 0;
}

vg::Vector arange(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw UsageError("bad grid range");
  vg::Vector g;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t k = 0; k <= count; ++k) g.push_back(lo + step * static_cast<double>(k));
  return g;
}

int cmd_phase(const Options& o) {
  if (o.p < 1) throw UsageError("--p must be positive");
  if (!(o.delta >= 0.0 && o.delta < 1.0)) throw UsageError("--delta must lie in [0, 1)");
  const OutputDir out(o.output_dir, config_json("phase", o));
  vg::Vector rho = arange(o.rho_step, 1.0 - o.delta - 1e-9, o.rho_step);
  const vg::Vector gamma = arange(o.gamma_lo, o.gamma_hi, o.gamma_cell);
  const vg::PhaseDiagram d = vg::phase_diagram(o.p, rho, gamma, o.delta);
  {
    auto t = out.table("phase_cells.tsv");
    vg::write_phase_cells(t, d);
  }
  {
    auto t = out.table("phase_boundary.tsv");
    vg::write_phase_boundary(t, d);
  }
  {
    const vg::Vector w = arange(0.0, 3.0, 0.01);
    auto t = out.table("shrinkage.tsv");
    vg::write_shrinkage(t, vg::univariate_shrinkage_curves(w, o.shrink_gamma, o.p, 1.0, 0.5, 0.5, 0.25));
  }
  for (const auto& p : out.written()) std::cout << p << '\n';
  return 0;
}

int cmd_bench(const Options& o) {
  const auto& names = vg::suite_names();
  if (std::find(names.begin(), names.end(), o.suite) == names.end())
    throw UsageError("unknown suite '" + o.suite + "'");
  vg::SuiteConfig cfg;
  cfg.suite = o.suite;
  cfg.instances = o.instances;
  cfg.seed = o.seed;
  cfg.workers = o.threads;
  cfg.eval.vg = fit_options(o);
  cfg.eval.lambda_grid = parse_lambda_grid(o.lambda_grid);
  Options resolved = o;
  resolved.instances = o.instances ? o.instances : vg::default_instances(o.suite);
  const OutputDir out(o.output_dir, config_json("bench", resolved));

  const vg::SuiteResult r = vg::run_suite(cfg);
  {
    auto t = out.table(o.suite + ".tsv");
    vg::write_suite_table(t, r);
  }
  {
    auto t = out.table(o.suite + "_instances.tsv");
    vg::write_suite_instances(t, r);
  }
  {
    auto t = out.table(o.suite + "_timing.tsv");
    vg::write_suite_timing(t, r);
  }
  for (const auto& p : out.written()) std::cout << p << '\n';
  return 0;
}

void add_fit_flags(CLI::App* c, Options& o) {
  c->add_option("--solver", o.solver, "auto, primal or dual")->check(CLI::IsMember({"auto", "primal", "dual"}));
  c->add_option("--epsilon", o.epsilon, "initial m and gamma_min target");
  c->add_option("--gamma-min", o.gamma_min, "override the data-derived gamma_min");
  c->add_option("--gamma-max", o.gamma_max, "override gamma_max");
  c->add_option("--gamma-step", o.gamma_step, "override the gamma step");
  c->add_option("--tol", o.tol, "fixed-point tolerance on max|m - proposal|");
  c->add_option("--max-iter", o.max_iter, "iteration cap per gamma");
  c->add_option("--lambda-grid", o.lambda_grid, "comma-separated lambdas for ridge/Lasso, or auto");
}

void add_data_flags(CLI::App* c, Options& o) {
  c->add_option("--input", o.input, "training data (y first, then features; comma or tab separated)");
  c->add_option("--val", o.val, "validation data; default holds out --val-fraction of --input");
  c->add_option("--val-fraction", o.val_fraction, "held-out fraction when --val is absent");
  c->add_option("--test", o.test, "test data");
  c->add_option("--truth", o.truth, "spec file with w_true, enables l1_error and roc_auc");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational Garrote sparse regression"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--output-dir", o.output_dir, "directory for output files")->capture_default_str();
  app.add_option("--seed", o.seed, "random seed")->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads for suites (0: all cores)");

  auto* fit = app.add_subcommand("fit", "fit VG with annealing and validation-selected gamma");
  add_data_flags(fit, o);
  add_fit_flags(fit, o);

  auto* sweep = app.add_subcommand("sweep", "VG gamma path and Lasso lambda path");
  add_data_flags(sweep, o);
  add_fit_flags(sweep, o);

  auto* gen = app.add_subcommand("gen", "generate synthetic train/val/test instances");
  gen->add_option("--suite", o.suite, "example1, example2, zhao_a or zhao_b");
  gen->add_option("--input", o.input, "spec file (key=value) instead of a named suite");
  gen->add_option("--instances", o.instances, "number of instances");

  auto* phase = app.add_subcommand("phase", "univariate phase diagram and shrinkage curves");
  phase->add_option("--p", o.p, "number of samples")->capture_default_str();
  phase->add_option("--delta", o.delta, "variance explained by other features")->capture_default_str();
  phase->add_option("--rho-step", o.rho_step, "rho grid spacing")->capture_default_str();
  phase->add_option("--gamma-lo", o.gamma_lo)->capture_default_str();
  phase->add_option("--gamma-hi", o.gamma_hi)->capture_default_str();
  phase->add_option("--gamma-cell", o.gamma_cell, "gamma grid spacing")->capture_default_str();
  phase->add_option("--shrinkage-gamma", o.shrink_gamma, "VG gamma for the shrinkage table")
      ->capture_default_str();

  auto* bench = app.add_subcommand("bench", "run an experiment suite");
  bench->add_option("--suite", o.suite, "example1, example2, zhao, noise_sweep, sample_sweep, dim_scaling")
      ->required();
  bench->add_option("--instances", o.instances, "instances per condition (0: suite default)");
  add_fit_flags(bench, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*fit) return cmd_fit(o);
    if (*sweep) return cmd_sweep(o);
    if (*gen) return cmd_gen(o);
    if (*phase) return cmd_phase(o);
    return cmd_bench(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const vg::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const vg::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
