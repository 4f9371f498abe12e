#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace heurlab {

/// Dense square cost matrix, row-major.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(std::size_t n, double fill = 0.0) : n_(n), values_(n * n, fill) {}
  /// Builds from nested rows; throws InputError when the rows are not square.
  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] double operator()(std::size_t row, std::size_t col) const { return values_[row * n_ + col]; }
  double& operator()(std::size_t row, std::size_t col) { return values_[row * n_ + col]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

struct Assignment {
  std::vector<std::size_t> column_of_row;
  double total_cost = 0.0;  ///< summed in row order
};

/// Minimum-cost perfect assignment (Hungarian method with potentials, O(n^3)).
/// Throws InputError on non-finite entries.
[[nodiscard]] Assignment hungarian_min_cost(const CostMatrix& cost);

/// Same, for nested rows; non-square input is an InputError.
[[nodiscard]] Assignment hungarian_min_cost(const std::vector<std::vector<double>>& rows);

}  // namespace heurlab
