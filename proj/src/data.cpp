#include "vgarrote/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "vgarrote/errors.hpp"
#include "vgarrote/simd.hpp"

namespace vg {

void validate(const Dataset& d) {
  if (d.x.rows() != d.y.size())
    throw DataError("x has " + std::to_string(d.x.rows()) + " rows but y has " +
                    std::to_string(d.y.size()) + " entries");
  if (d.y.size() < 2) throw DataError("need at least 2 samples");
  if (d.x.cols() < 1) throw DataError("need at least 1 feature");
  for (std::size_t r = 0; r < d.x.rows(); ++r) {
    if (!std::isfinite(d.y[r])) throw DataError("non-finite y at row " + std::to_string(r));
    for (double v : d.x.row(r))
      if (!std::isfinite(v)) throw DataError("non-finite x at row " + std::to_string(r));
  }
}

CenteredDataset center(const Dataset& d) {
  validate(d);
  const std::size_t p = d.samples();
  const std::size_t n = d.features();
  CenteredDataset c;
  c.x_mean.assign(n, 0.0);
  for (std::size_t r = 0; r < p; ++r) simd::axpy(1.0, d.x.row(r), c.x_mean);
  for (double& m : c.x_mean) m /= static_cast<double>(p);
  c.y_mean = std::accumulate(d.y.begin(), d.y.end(), 0.0) / static_cast<double>(p);

  c.x_c = d.x;
  for (std::size_t r = 0; r < p; ++r) simd::axpy(-1.0, c.x_mean, c.x_c.row(r));
  c.y_c.resize(p);
  for (std::size_t r = 0; r < p; ++r) c.y_c[r] = d.y[r] - c.y_mean;
  return c;
}

SufficientStats sufficient_stats(const CenteredDataset& data, bool full_chi) {
  const std::size_t p = data.samples();
  const std::size_t n = data.features();
  const double inv_p = 1.0 / static_cast<double>(p);
  SufficientStats s;
  s.p = p;
  s.n = n;
  s.b = multiply_transposed(data.x_c, data.y_c);
  for (double& v : s.b) v *= inv_p;
  s.sigma_y2 = simd::sum_sq(data.y_c) * inv_p;

  s.chi_diag.assign(n, 0.0);
  for (std::size_t r = 0; r < p; ++r) {
    const auto row = data.x_c.row(r);
    for (std::size_t i = 0; i < n; ++i) s.chi_diag[i] += row[i] * row[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    s.chi_diag[i] *= inv_p;
    if (!(s.chi_diag[i] > 0.0)) {
      s.chi_diag[i] = 0.0;
      s.b[i] = 0.0;
      s.zero_variance.push_back(i);
    }
  }

  if (full_chi) {
    // chi = X^T X / p, accumulated from feature-major columns.
    const Matrix xt = data.x_c.transposed();
    Matrix chi(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = xt.row(i);
      std::size_t j = i;
      double out[4];
      for (; j + 4 <= n; j += 4) {
        simd::kernels().dot4(xi.data(), xt.row(j).data(), xt.row(j + 1).data(),
                             xt.row(j + 2).data(), xt.row(j + 3).data(), p, out);
        for (int k = 0; k < 4; ++k) chi(i, j + k) = out[k] * inv_p;
      }
      for (; j < n; ++j) chi(i, j) = simd::dot(xi, xt.row(j)) * inv_p;
      for (j = i + 1; j < n; ++j) chi(j, i) = chi(i, j);
    }
    for (std::size_t i : s.zero_variance)
      for (std::size_t j = 0; j < n; ++j) chi(i, j) = chi(j, i) = 0.0;
    // Keep the diagonal bit-identical to chi_diag.
    for (std::size_t i = 0; i < n; ++i) chi(i, i) = s.chi_diag[i];
    s.chi = std::move(chi);
  }
  return s;
}

Dataset select_rows(const Dataset& d, const std::vector<std::size_t>& rows) {
  Dataset out{Matrix(rows.size(), d.features()), Vector(rows.size())};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto src = d.x.row(rows[k]);
    std::copy(src.begin(), src.end(), out.x.row(k).begin());
    out.y[k] = d.y[rows[k]];
  }
  return out;
}

std::tuple<Dataset, Dataset, Dataset> split(const Dataset& d, std::size_t p_train,
                                            std::size_t p_val, std::size_t p_test,
                                            std::uint64_t seed) {
  const std::size_t p = d.samples();
  if (p_train + p_val + p_test > p)
    throw DataError("split sizes " + std::to_string(p_train + p_val + p_test) +
                    " exceed sample count " + std::to_string(p));
  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the permutation does not depend on
  // the standard library's shuffle implementation.
  for (std::size_t i = p; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng)]);
  }
  auto take = [&](std::size_t from, std::size_t count) {
    return select_rows(d, std::vector<std::size_t>(perm.begin() + static_cast<std::ptrdiff_t>(from),
                                                   perm.begin() + static_cast<std::ptrdiff_t>(from + count)));
  };
  return {take(0, p_train), take(p_train, p_val), take(p_train + p_val, p_test)};
}

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t line_no) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find_first_of(",\t", pos);
    if (end == std::string::npos) end = line.size();
    std::size_t a = pos, b = end;
    while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1]))) --b;
    if (a == b) throw DataError("empty field on line " + std::to_string(line_no));
    double v = 0.0;
    const char* first = line.data() + a;
    const char* last = line.data() + b;
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      throw DataError("cannot parse '" + line.substr(a, b - a) + "' on line " +
                      std::to_string(line_no));
    vals.push_back(v);
    pos = end + 1;
  }
  return vals;
}

}  // namespace

Dataset read_dataset(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    rows.push_back(parse_row(line, line_no));
    if (rows.back().size() < 2)
      throw DataError("line " + std::to_string(line_no) + " needs y and at least one feature");
    if (rows.back().size() != rows.front().size())
      throw DataError("line " + std::to_string(line_no) + " has " +
                      std::to_string(rows.back().size()) + " fields, expected " +
                      std::to_string(rows.front().size()));
  }
  if (rows.empty()) throw DataError("dataset is empty");
  const std::size_t n = rows.front().size() - 1;
  Dataset d{Matrix(rows.size(), n), Vector(rows.size())};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    d.y[r] = rows[r][0];
    std::copy(rows[r].begin() + 1, rows[r].end(), d.x.row(r).begin());
  }
  validate(d);
  return d;
}

Dataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& d, const std::string& header) {
  if (!header.empty()) {
    std::istringstream hs(header);
    std::string l;
    while (std::getline(hs, l)) out << "# " << l << '\n';
  }
  out << std::setprecision(17);
  for (std::size_t r = 0; r < d.samples(); ++r) {
    out << d.y[r];
    for (double v : d.x.row(r)) out << ',' << v;
    out << '\n';
  }
}

}  // namespace vg
