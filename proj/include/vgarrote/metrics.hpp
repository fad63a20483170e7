#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "vgarrote/linalg.hpp"

namespace vg {

struct EvalReport {
  double train_mse = 0.0;
  double val_mse = 0.0;
  double test_mse = 0.0;
  double l1_error = 0.0;
  /// Empty for methods without a notion of support (ridge).
  std::optional<std::size_t> nonzero;
  double roc_auc = 0.5;
};

double mse(std::span<const double> y_pred, std::span<const double> y_true);

/// sum_i |v_i - w_true_i|
double l1_error(std::span<const double> v, std::span<const double> w_true);

/// Number of m_i strictly above 0.5.
std::size_t nonzero_count_vg(std::span<const double> m);
/// Number of exactly nonzero weights.
std::size_t nonzero_count_exact(std::span<const double> w);

/// Area under the ROC curve of |v| as a score for the active features of
/// w_true (Mann-Whitney statistic, ties count 1/2). Throws
/// std::invalid_argument when w_true is all-zero or all-nonzero.
double roc_auc(std::span<const double> v, std::span<const double> w_true);

/// Delimited-text row; ridge rows print "-" for the nonzero column.
void write_report_row(std::ostream& out, const std::string& label, const EvalReport& r);

}  // namespace vg
