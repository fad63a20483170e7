#include "vgarrote/generators.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "vgarrote/errors.hpp"

namespace vg {
namespace {

// Lower-triangular Cholesky factor of a covariance; NumericalError if not PD.
Matrix cholesky_factor(const Matrix& c) {
  const std::size_t n = c.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = c(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 1e-12 * std::max(1.0, c(j, j))))
      throw NumericalError("requested covariance is not positive definite");
    d = std::sqrt(d);
    l(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = c(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / d;
    }
  }
  return l;
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double normal() { return dist_(rng_); }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

Dataset draw(Sampler& s, std::size_t rows, const Matrix* factor, std::size_t n, const Vector& w,
             double noise_sd) {
  Dataset d{Matrix(rows, n), Vector(rows)};
  Vector z(n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (double& v : z) v = s.normal();
    auto x = d.x.row(r);
    if (factor) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= i; ++k) acc += (*factor)(i, k) * z[k];
        x[i] = acc;
      }
    } else {
      std::copy(z.begin(), z.end(), x.begin());
    }
    double y = 0.0;
    for (std::size_t i = 0; i < n; ++i) y += w[i] * x[i];
    d.y[r] = y + noise_sd * s.normal();
  }
  return d;
}

Dataset draw_zhao(Sampler& s, std::size_t rows, const Vector& w) {
  Dataset d{Matrix(rows, 3), Vector(rows)};
  for (std::size_t r = 0; r < rows; ++r) {
    const double x1 = s.normal();
    const double x2 = s.normal();
    const double xi = s.normal();
    const double e = s.normal();
    const double x3 = 2.0 / 3.0 * x1 + 2.0 / 3.0 * x2 + xi;
    d.x(r, 0) = x1;
    d.x(r, 1) = x2;
    d.x(r, 2) = x3;
    d.y[r] = w[0] * x1 + w[1] * x2 + w[2] * x3 + e;
  }
  return d;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer over (base, index)
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Matrix covariance_matrix(const InstanceSpec& spec) {
  const std::size_t n = spec.n;
  Matrix c(n, n);
  switch (spec.covariance) {
    case Covariance::identity:
      return Matrix::identity(n);
    case Covariance::toeplitz:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          c(i, j) = std::pow(spec.zeta, static_cast<double>(i > j ? i - j : j - i));
      return c;
    case Covariance::block:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          c(i, j) = i == j ? 1.0 : (i / spec.block_size == j / spec.block_size ? spec.within_corr : 0.0);
      return c;
    case Covariance::zhao:
      break;
  }
  throw std::invalid_argument("covariance_matrix: zhao instances have a fixed generative form");
}

GeneratedInstance gen_instance(const InstanceSpec& spec) {
  if (spec.covariance == Covariance::zhao) {
    auto g = gen_zhao(spec.zhao_variant, spec.p, spec.seed, spec.p_val, spec.p_test);
    g.spec = spec;
    return g;
  }
  if (spec.n == 0 || spec.p < 2) throw std::invalid_argument("instance spec needs n >= 1, p >= 2");
  if (spec.w_true.size() != spec.n)
    throw std::invalid_argument("w_true has " + std::to_string(spec.w_true.size()) +
                                " entries, expected n=" + std::to_string(spec.n));
  if (!(spec.noise_sd >= 0.0)) throw std::invalid_argument("noise_sd must be >= 0");
  if (spec.covariance == Covariance::toeplitz && !(spec.zeta >= 0.0 && spec.zeta < 1.0))
    throw std::invalid_argument("toeplitz zeta must lie in [0,1)");
  if (spec.covariance == Covariance::block &&
      (!(spec.within_corr >= 0.0 && spec.within_corr < 1.0) || spec.block_size == 0))
    throw std::invalid_argument("block covariance needs within_corr in [0,1) and block_size >= 1");

  std::optional<Matrix> factor;
  if (spec.covariance != Covariance::identity) factor = cholesky_factor(covariance_matrix(spec));

  Sampler s(spec.seed);
  GeneratedInstance g;
  g.spec = spec;
  g.w_true = spec.w_true;
  const Matrix* f = factor ? &*factor : nullptr;
  g.train = draw(s, spec.p, f, spec.n, spec.w_true, spec.noise_sd);
  g.val = draw(s, spec.p_val, f, spec.n, spec.w_true, spec.noise_sd);
  g.test = draw(s, spec.p_test, f, spec.n, spec.w_true, spec.noise_sd);
  return g;
}

GeneratedInstance gen_zhao(char variant, std::size_t p, std::uint64_t seed, std::size_t p_val,
                           std::size_t p_test) {
  if (variant != 'a' && variant != 'b') throw std::invalid_argument("zhao variant must be 'a' or 'b'");
  if (p < 3) throw std::invalid_argument("zhao instance needs p >= 3");
  GeneratedInstance g;
  g.w_true = variant == 'a' ? Vector{2.0, 3.0, 0.0} : Vector{-2.0, 3.0, 0.0};
  g.spec.n = 3;
  g.spec.p = p;
  g.spec.p_val = p_val;
  g.spec.p_test = p_test;
  g.spec.w_true = g.w_true;
  g.spec.noise_sd = 1.0;
  g.spec.covariance = Covariance::zhao;
  g.spec.zhao_variant = variant;
  g.spec.seed = seed;
  Sampler s(seed);
  g.train = draw_zhao(s, p, g.w_true);
  g.val = draw_zhao(s, p_val, g.w_true);
  g.test = draw_zhao(s, p_test, g.w_true);
  return g;
}

Vector random_sparse_teacher(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k > n) throw std::invalid_argument("more active features than features");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  Vector w(n, 0.0);
  for (std::size_t i = 0; i < k; ++i) w[idx[i]] = 1.0;
  return w;
}

InstanceSpec example1_spec(std::uint64_t seed) {
  InstanceSpec s;
  s.n = 100;
  s.p = 50;
  s.p_val = 50;
  s.p_test = 400;
  s.w_true.assign(100, 0.0);
  s.w_true[0] = 1.0;
  s.noise_sd = 1.0;
  s.covariance = Covariance::identity;
  s.seed = seed;
  return s;
}

InstanceSpec example2_spec(std::uint64_t seed) {
  InstanceSpec s = example1_spec(seed);
  s.w_true.assign(100, 0.0);
  for (std::size_t i : {1, 2, 5, 10, 50}) s.w_true[i - 1] = 1.0;
  s.covariance = Covariance::toeplitz;
  s.zeta = 0.5;
  return s;
}

std::string to_string(Covariance c) {
  switch (c) {
    case Covariance::identity: return "identity";
    case Covariance::toeplitz: return "toeplitz";
    case Covariance::block: return "block";
    case Covariance::zhao: return "zhao";
  }
  return "identity";
}

Covariance covariance_from_string(const std::string& s) {
  if (s == "identity") return Covariance::identity;
  if (s == "toeplitz") return Covariance::toeplitz;
  if (s == "block") return Covariance::block;
  if (s == "zhao") return Covariance::zhao;
  throw std::invalid_argument("unknown covariance '" + s + "'");
}

void write_spec(std::ostream& out, const InstanceSpec& spec) {
  out << std::setprecision(17);
  out << "n=" << spec.n << '\n'
      << "p=" << spec.p << '\n'
      << "p_val=" << spec.p_val << '\n'
      << "p_test=" << spec.p_test << '\n'
      << "noise_sd=" << spec.noise_sd << '\n'
      << "covariance=" << to_string(spec.covariance) << '\n'
      << "zeta=" << spec.zeta << '\n'
      << "block_size=" << spec.block_size << '\n'
      << "within_corr=" << spec.within_corr << '\n'
      << "zhao_variant=" << spec.zhao_variant << '\n'
      << "seed=" << spec.seed << '\n'
      << "w_true=";
  for (std::size_t i = 0; i < spec.w_true.size(); ++i) out << (i ? "," : "") << spec.w_true[i];
  out << '\n';
}

InstanceSpec read_spec(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw DataError("malformed spec line: " + line);
      continue;
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  InstanceSpec s;
  auto get = [&](const char* key, auto& dst) {
    if (auto it = kv.find(key); it != kv.end()) {
      std::istringstream is(it->second);
      if (!(is >> dst)) throw DataError(std::string("bad value for ") + key);
    }
  };
  get("n", s.n);
  get("p", s.p);
  get("p_val", s.p_val);
  get("p_test", s.p_test);
  get("noise_sd", s.noise_sd);
  get("zeta", s.zeta);
  get("block_size", s.block_size);
  get("within_corr", s.within_corr);
  get("zhao_variant", s.zhao_variant);
  get("seed", s.seed);
  if (auto it = kv.find("covariance"); it != kv.end()) s.covariance = covariance_from_string(it->second);
  if (auto it = kv.find("w_true"); it != kv.end()) {
    std::istringstream is(it->second);
    std::string tok;
    while (std::getline(is, tok, ',')) s.w_true.push_back(std::stod(tok));
  } else if (auto act = kv.find("active"); act != kv.end()) {
    // 1-based list of unit-weight features
    s.w_true.assign(s.n, 0.0);
    std::istringstream is(act->second);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      const auto i = std::stoul(tok);
      if (i < 1 || i > s.n) throw DataError("active index out of range: " + tok);
      s.w_true[i - 1] = 1.0;
    }
  }
  if (s.covariance == Covariance::zhao) {
    s.n = 3;
    s.w_true = s.zhao_variant == 'b' ? Vector{-2.0, 3.0, 0.0} : Vector{2.0, 3.0, 0.0};
  }
  return s;
}

}  // namespace vg
