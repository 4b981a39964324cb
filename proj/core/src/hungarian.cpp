#include "stabidx/hungarian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stabidx {
namespace {

// Uniform padding for rectangular instances. Any constant works: every
// maximal assignment carries the same number of padded cells, so the optimum
// over real cells is unaffected.
constexpr double kPadCost = 1.0e3;

}  // namespace

// Jonker-Volgenant style shortest augmenting path, O(n^3), 1-indexed
// internals.
AssignmentResult solve_assignment(const std::vector<double>& cost, int rows, int cols) {
  if (rows < 0 || cols < 0 || cost.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("solve_assignment: cost size does not match rows x cols");
  }
  for (double c : cost) {
    if (!std::isfinite(c)) throw std::invalid_argument("solve_assignment: non-finite cost");
  }

  AssignmentResult result;
  result.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return result;

  const int n = std::max(rows, cols);
  auto at = [&](int r, int c) -> double {
    return (r < rows && c < cols) ? cost[static_cast<std::size_t>(r) * cols + c] : kPadCost;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> col_to_row(n + 1, 0), way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    col_to_row[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = col_to_row[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[col_to_row[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_to_row[j0] != 0);
    do {
      const int j1 = way[j0];
      col_to_row[j0] = col_to_row[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= n; ++j) {
    const int r = col_to_row[j] - 1;
    const int c = j - 1;
    if (r < rows && c < cols) {
      result.row_to_col[r] = c;
      result.total_cost += cost[static_cast<std::size_t>(r) * cols + c];
    }
  }
  return result;
}

}  // namespace stabidx
