#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "vgarrote/linalg.hpp"

namespace vg {

/// Raw regression data: x is [samples x features], y has one entry per sample.
struct Dataset {
  Matrix x;
  Vector y;

  std::size_t samples() const noexcept { return y.size(); }
  std::size_t features() const noexcept { return x.cols(); }
};

/// Throws DataError unless p >= 2, n >= 1, shapes agree and all entries are finite.
void validate(const Dataset& d);

struct CenteredDataset {
  Matrix x_c;
  Vector y_c;
  Vector x_mean;
  double y_mean = 0.0;

  std::size_t samples() const noexcept { return y_c.size(); }
  std::size_t features() const noexcept { return x_c.cols(); }
};

CenteredDataset center(const Dataset& d);

/// Centered moments. `chi` is only materialized on request (it costs O(p n^2)).
struct SufficientStats {
  Vector b;
  std::optional<Matrix> chi;
  Vector chi_diag;
  double sigma_y2 = 0.0;
  std::size_t p = 0;
  std::size_t n = 0;
  /// Features with chi_ii == 0; they are pinned to zero weight by the solvers.
  std::vector<std::size_t> zero_variance;

  bool is_active(std::size_t i) const noexcept { return chi_diag[i] > 0.0; }
};

SufficientStats sufficient_stats(const CenteredDataset& data, bool full_chi);

/// Disjoint random row subsets, deterministic in `seed`.
std::tuple<Dataset, Dataset, Dataset> split(const Dataset& d, std::size_t p_train,
                                            std::size_t p_val, std::size_t p_test,
                                            std::uint64_t seed);

Dataset select_rows(const Dataset& d, const std::vector<std::size_t>& rows);

/// Delimited text: one sample per line, y first then x_1..x_n, comma or tab
/// separated. Lines starting with '#' are comments.
Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);
void write_dataset(std::ostream& out, const Dataset& d, const std::string& header = {});

}  // namespace vg
