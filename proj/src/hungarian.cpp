#include "heurlab/hungarian.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "heurlab/common.hpp"

namespace heurlab {

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  CostMatrix m(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.size()) {
      throw InputError("cost matrix is not square: row " + std::to_string(r) + " has " +
                       std::to_string(rows[r].size()) + " entries, expected " +
                       std::to_string(rows.size()));
    }
    for (std::size_t c = 0; c < rows.size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Assignment hungarian_min_cost(const CostMatrix& cost) {
  const std::size_t n = cost.size();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (!std::isfinite(cost(r, c))) {
        throw InputError("cost matrix entry (" + std::to_string(r) + ", " + std::to_string(c) +
                         ") is not finite");
      }
    }
  }
  Assignment result;
  if (n == 0) return result;

  // 1-based potentials formulation; column 0 is a virtual sink.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
  std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> min_slack(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = row_of_col[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - row_pot[i0] - col_pot[j];
        if (reduced < min_slack[j]) {
          min_slack[j] = reduced;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          row_pot[row_of_col[j]] += delta;
          col_pot[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  result.column_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) result.column_of_row[row_of_col[j] - 1] = j - 1;
  for (std::size_t r = 0; r < n; ++r) result.total_cost += cost(r, result.column_of_row[r]);
  return result;
}

Assignment hungarian_min_cost(const std::vector<std::vector<double>>& rows) {
  return hungarian_min_cost(CostMatrix::from_rows(rows));
}

}  // namespace heurlab
