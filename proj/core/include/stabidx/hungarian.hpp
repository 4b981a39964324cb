#pragma once

#include <vector>

namespace stabidx {

struct AssignmentResult {
  std::vector<int> row_to_col;  // -1 for rows left unassigned
  double total_cost = 0.0;      // sum over assigned (row, col) cells
};

/// Minimum-cost assignment over a dense rows x cols matrix (row-major).
/// Rectangular inputs are padded internally with a uniform dummy cost, so
/// exactly min(rows, cols) real pairs end up assigned. Deterministic:
/// equal-cost optima resolve by the fixed augmenting scan order.
AssignmentResult solve_assignment(const std::vector<double>& cost, int rows, int cols);

}  // namespace stabidx
