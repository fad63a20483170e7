#include "vgarrote/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "vgarrote/baselines.hpp"

namespace vg {
namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void score(MethodOutcome& out, const GeneratedInstance& inst, const Vector& train_pred,
           const Vector& val_pred, const Vector& test_pred) {
  out.report.train_mse = mse(train_pred, inst.train.y);
  out.report.val_mse = inst.val.samples() ? mse(val_pred, inst.val.y) : 0.0;
  out.report.test_mse = inst.test.samples() ? mse(test_pred, inst.test.y) : 0.0;
  out.report.l1_error = l1_error(out.v, inst.w_true);
  const bool has_pos = std::any_of(inst.w_true.begin(), inst.w_true.end(), [](double w) { return w != 0.0; });
  const bool has_neg = std::any_of(inst.w_true.begin(), inst.w_true.end(), [](double w) { return w == 0.0; });
  out.report.roc_auc = has_pos && has_neg ? roc_auc(out.v, inst.w_true) : 1.0;
}

MethodOutcome run_baseline(const GeneratedInstance& inst, BaselineMethod method, const Vector& grid) {
  MethodOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const BaselineCv cv = baseline_cv(inst.train, inst.val, method, grid);
  out.seconds = seconds_since(t0);
  out.v = cv.best.w;
  score(out, inst, cv.predict(inst.train.x), inst.val.samples() ? cv.predict(inst.val.x) : Vector{},
        inst.test.samples() ? cv.predict(inst.test.x) : Vector{});
  if (method == BaselineMethod::lasso) out.report.nonzero = nonzero_count_exact(cv.best.w);
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

InstanceOutcome evaluate_instance(const GeneratedInstance& inst, const EvalOptions& opts, std::size_t index) {
  InstanceOutcome r;
  r.index = index;
  r.seed = inst.spec.seed;
  r.w_true = inst.w_true;

  const auto t0 = std::chrono::steady_clock::now();
  const FitResult f = fit(inst.train, inst.val, opts.vg);
  r.vg.seconds = seconds_since(t0);
  r.vg.v = solution_vector(f.best);
  score(r.vg, inst, f.predict(inst.train.x), inst.val.samples() ? f.predict(inst.val.x) : Vector{},
        inst.test.samples() ? f.predict(inst.test.x) : Vector{});
  r.vg.report.nonzero = nonzero_count_vg(f.best.m);
  r.vg_gamma = f.best.gamma;
  r.vg_beta = f.best.beta;
  r.vg_m = f.best.m;

  if (opts.ridge) r.ridge = run_baseline(inst, BaselineMethod::ridge, opts.lambda_grid);
  if (opts.lasso) r.lasso = run_baseline(inst, BaselineMethod::lasso, opts.lambda_grid);

  r.truth.v = inst.w_true;
  const Vector zero(inst.w_true.size(), 0.0);
  auto truth_pred = [&](const Dataset& d) {
    return d.samples() ? predict_linear(inst.w_true, d.x, zero, 0.0) : Vector{};
  };
  score(r.truth, inst, truth_pred(inst.train), truth_pred(inst.val), truth_pred(inst.test));
  r.truth.report.nonzero = nonzero_count_exact(inst.w_true);
  return r;
}

std::vector<InstanceOutcome> evaluate_all(const std::vector<InstanceSpec>& specs, const EvalOptions& opts,
                                          std::size_t workers) {
  std::vector<InstanceOutcome> out(specs.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(specs.size(), 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < specs.size();) {
      try {
        out[k] = evaluate_instance(gen_instance(specs[k]), opts, k);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  s.max = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    sum += x;
    s.max = std::max(s.max, x);
  }
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

std::vector<SuiteRow> summarize_condition(const std::string& condition,
                                          const std::vector<InstanceOutcome>& outcomes) {
  std::vector<SuiteRow> rows;
  auto add = [&](const std::string& method, auto&& pick) {
    std::vector<double> tr, va, te, l1, auc, sec, nz, v3;
    bool has_nz = true;
    for (const auto& o : outcomes) {
      const MethodOutcome* m = pick(o);
      if (!m) return;
      tr.push_back(m->report.train_mse);
      va.push_back(m->report.val_mse);
      te.push_back(m->report.test_mse);
      l1.push_back(m->report.l1_error);
      auc.push_back(m->report.roc_auc);
      sec.push_back(m->seconds);
      if (m->report.nonzero)
        nz.push_back(static_cast<double>(*m->report.nonzero));
      else
        has_nz = false;
      if (m->v.size() == 3) v3.push_back(std::abs(m->v[2]));
    }
    SuiteRow r;
    r.condition = condition;
    r.method = method;
    r.train_mse = summarize(tr);
    r.val_mse = summarize(va);
    r.test_mse = summarize(te);
    r.l1_error = summarize(l1);
    r.roc_auc = summarize(auc);
    r.seconds = summarize(sec);
    if (has_nz) r.nonzero = summarize(nz);
    if (!v3.empty()) r.abs_v3 = summarize(v3);
    rows.push_back(r);
  };
  add("ridge", [](const InstanceOutcome& o) -> const MethodOutcome* { return o.ridge ? &*o.ridge : nullptr; });
  add("lasso", [](const InstanceOutcome& o) -> const MethodOutcome* { return o.lasso ? &*o.lasso : nullptr; });
  add("vg", [](const InstanceOutcome& o) -> const MethodOutcome* { return &o.vg; });
  add("true", [](const InstanceOutcome& o) -> const MethodOutcome* { return &o.truth; });
  return rows;
}

std::vector<InstanceSpec> example1_specs(std::size_t count, std::uint64_t seed) {
  std::vector<InstanceSpec> s;
  for (std::size_t k = 0; k < count; ++k) s.push_back(example1_spec(derive_seed(seed, k)));
  return s;
}

std::vector<InstanceSpec> example2_specs(std::size_t count, std::uint64_t seed) {
  std::vector<InstanceSpec> s;
  for (std::size_t k = 0; k < count; ++k) s.push_back(example2_spec(derive_seed(seed, k)));
  return s;
}

std::vector<InstanceSpec> zhao_specs(char variant, std::size_t count, std::uint64_t seed) {
  std::vector<InstanceSpec> s;
  for (std::size_t k = 0; k < count; ++k) {
    InstanceSpec sp;
    sp.covariance = Covariance::zhao;
    sp.zhao_variant = variant;
    sp.n = 3;
    sp.p = 1000;
    sp.p_val = 1000;
    sp.p_test = 1000;
    sp.noise_sd = 1.0;
    sp.w_true = variant == 'a' ? Vector{2.0, 3.0, 0.0} : Vector{-2.0, 3.0, 0.0};
    sp.seed = derive_seed(seed, k);
    s.push_back(sp);
  }
  return s;
}

std::vector<InstanceSpec> noise_specs(double zeta, double noise_var, std::size_t count, std::uint64_t seed) {
  std::vector<InstanceSpec> s;
  for (std::size_t k = 0; k < count; ++k) {
    InstanceSpec sp;
    sp.n = 100;
    sp.p = 100;
    sp.p_val = 20;
    sp.p_test = 400;
    sp.covariance = Covariance::toeplitz;
    sp.zeta = zeta;
    sp.noise_sd = std::sqrt(noise_var);
    sp.seed = derive_seed(seed, k);
    sp.w_true = random_sparse_teacher(sp.n, 20, derive_seed(sp.seed, 7));
    s.push_back(sp);
  }
  return s;
}

std::vector<InstanceSpec> sample_specs(std::size_t n, double p_fraction, double active_fraction,
                                       Covariance cov, std::size_t count, std::uint64_t seed) {
  std::vector<InstanceSpec> s;
  const std::size_t p = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(p_fraction * n)));
  const std::size_t active = static_cast<std::size_t>(std::lround(active_fraction * n));
  for (std::size_t k = 0; k < count; ++k) {
    InstanceSpec sp;
    sp.n = n;
    sp.p = p;
    sp.p_val = std::max<std::size_t>(2, cov == Covariance::block ? p / 10 : p / 30);
    sp.p_test = 400;
    sp.covariance = cov;
    sp.noise_sd = 1.0;
    sp.seed = derive_seed(seed, k);
    sp.w_true = random_sparse_teacher(n, active, derive_seed(sp.seed, 7));
    s.push_back(sp);
  }
  return s;
}

std::vector<InstanceSpec> scaling_specs(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n < 50) throw std::invalid_argument("scaling suite needs n >= 50");
  std::vector<InstanceSpec> s;
  for (std::size_t k = 0; k < count; ++k) {
    InstanceSpec sp;
    sp.n = n;
    sp.p = 100;
    sp.p_val = 100;
    sp.p_test = 400;
    sp.covariance = Covariance::identity;
    sp.noise_sd = std::sqrt(0.5);
    sp.seed = derive_seed(seed, k);
    sp.w_true.assign(n, 0.0);
    for (std::size_t i : {1, 2, 5, 10, 50}) sp.w_true[i - 1] = 1.0;
    s.push_back(sp);
  }
  return s;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"example1",    "example2",     "zhao",
                                              "noise_sweep", "sample_sweep", "dim_scaling"};
  return names;
}

std::size_t default_instances(const std::string& suite) {
  if (suite == "zhao") return 100;
  if (suite == "noise_sweep") return 10;
  return 20;
}

SuiteResult run_suite(const SuiteConfig& cfg) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), cfg.suite) == names.end())
    throw std::invalid_argument("unknown suite '" + cfg.suite + "'");
  const std::size_t count = cfg.instances ? cfg.instances : default_instances(cfg.suite);
  SuiteResult res;
  res.suite = cfg.suite;
  auto run = [&](const std::string& cond, const std::vector<InstanceSpec>& specs, std::size_t workers) {
    auto outcomes = evaluate_all(specs, cfg.eval, workers);
    auto rows = summarize_condition(cond, outcomes);
    res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    res.raw.emplace_back(cond, std::move(outcomes));
  };

  if (cfg.suite == "example1") {
    run("example1", example1_specs(count, cfg.seed), cfg.workers);
  } else if (cfg.suite == "example2") {
    run("example2", example2_specs(count, cfg.seed), cfg.workers);
  } else if (cfg.suite == "zhao") {
    run("a", zhao_specs('a', count, cfg.seed), cfg.workers);
    run("b", zhao_specs('b', count, derive_seed(cfg.seed, 1000003)), cfg.workers);
  } else if (cfg.suite == "noise_sweep") {
    for (double zeta : {0.5, 0.95})
      for (double s2 : {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0})
        run("zeta=" + format_double(zeta) + ";noise_var=" + format_double(s2),
            noise_specs(zeta, s2, count, cfg.seed), cfg.workers);
  } else if (cfg.suite == "sample_sweep") {
    for (Covariance cov : {Covariance::identity, Covariance::block})
      for (double act : {0.10, 0.25})
        for (double frac : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0})
          run(to_string(cov) + ";active=" + format_double(act) + ";p_over_n=" + format_double(frac),
              sample_specs(cfg.sample_sweep_n, frac, act, cov, count, cfg.seed), cfg.workers);
  } else {
    // Timing suite: sequential so wall-clock per instance is not shared.
    for (std::size_t n : {200, 400, 800, 1600})
      run("n=" + std::to_string(n), scaling_specs(n, count, cfg.seed), 1);
  }
  return res;
}

void write_suite_table(std::ostream& out, const SuiteResult& r) {
  out << "# condition\tmethod\ttrain_mse\ttrain_sd\tval_mse\tval_sd\ttest_mse\ttest_sd\tnonzero\tnonzero_sd"
         "\tl1_error\tl1_sd\troc_auc\troc_sd\tmax_abs_v3\n";
  out << std::setprecision(6);
  for (const auto& row : r.rows) {
    out << row.condition << '\t' << row.method << '\t' << row.train_mse.mean << '\t' << row.train_mse.sd << '\t'
        << row.val_mse.mean << '\t' << row.val_mse.sd << '\t' << row.test_mse.mean << '\t' << row.test_mse.sd
        << '\t';
    if (row.nonzero)
      out << row.nonzero->mean << '\t' << row.nonzero->sd;
    else
      out << "-\t-";
    out << '\t' << row.l1_error.mean << '\t' << row.l1_error.sd << '\t' << row.roc_auc.mean << '\t'
        << row.roc_auc.sd << '\t';
    if (row.abs_v3)
      out << row.abs_v3->max;
    else
      out << '-';
    out << '\n';
  }
}

void write_suite_timing(std::ostream& out, const SuiteResult& r) {
  out << "# condition\tmethod\tseconds\tseconds_sd\n";
  out << std::setprecision(6);
  for (const auto& row : r.rows)
    if (row.method != "true") out << row.condition << '\t' << row.method << '\t' << row.seconds.mean << '\t' << row.seconds.sd << '\n';
}

void write_suite_instances(std::ostream& out, const SuiteResult& r) {
  out << "# condition\tindex\tseed\tmethod\ttrain_mse\tval_mse\ttest_mse\tnonzero\tl1_error\troc_auc\n";
  out << std::setprecision(10);
  for (const auto& [cond, outcomes] : r.raw) {
    for (const auto& o : outcomes) {
      auto row = [&](const char* name, const MethodOutcome& m) {
        out << cond << '\t' << o.index << '\t' << o.seed << '\t';
        write_report_row(out, name, m.report);
      };
      if (o.ridge) row("ridge", *o.ridge);
      if (o.lasso) row("lasso", *o.lasso);
      row("vg", o.vg);
    }
  }
}

}  // namespace vg
