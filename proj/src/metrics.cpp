#include "vgarrote/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace vg {

double mse(std::span<const double> y_pred, std::span<const double> y_true) {
  if (y_pred.size() != y_true.size()) throw std::invalid_argument("mse: length mismatch");
  if (y_pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < y_pred.size(); ++i) {
    const double r = y_pred[i] - y_true[i];
    s += r * r;
  }
  return s / static_cast<double>(y_pred.size());
}

double l1_error(std::span<const double> v, std::span<const double> w_true) {
  if (v.size() != w_true.size()) throw std::invalid_argument("l1_error: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += std::abs(v[i] - w_true[i]);
  return s;
}

std::size_t nonzero_count_vg(std::span<const double> m) {
  return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](double x) { return x > 0.5; }));
}

std::size_t nonzero_count_exact(std::span<const double> w) {
  return static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double x) { return x != 0.0; }));
}

double roc_auc(std::span<const double> v, std::span<const double> w_true) {
  const std::size_t n = v.size();
  if (w_true.size() != n) throw std::invalid_argument("roc_auc: length mismatch");
  std::size_t n_pos = 0;
  for (double w : w_true) n_pos += w != 0.0;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("roc_auc: truth needs both active and inactive features");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(v[a]) < std::abs(v[b]); });
  // Midranks over tie groups, 1-based.
  double rank_sum_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(v[order[j + 1]]) == std::abs(v[order[i]])) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (w_true[order[k]] != 0.0) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

void write_report_row(std::ostream& out, const std::string& label, const EvalReport& r) {
  out << label << '\t' << r.train_mse << '\t' << r.val_mse << '\t' << r.test_mse << '\t';
  if (r.nonzero)
    out << *r.nonzero;
  else
    out << '-';
  out << '\t' << r.l1_error << '\t' << r.roc_auc << '\n';
}

}  // namespace vg
