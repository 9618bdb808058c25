#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace resmot {

/// Marks a forbidden (row, column) pair in a cost matrix.
inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

/// Dense row-major cost matrix.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Result of a rectangular assignment: `row_to_col[r]` is -1 when row r is
/// left unassigned.
struct Assignment {
  std::vector<int> row_to_col;
  double total_cost = 0.0;

  std::vector<std::pair<int, int>> pairs() const;
};

/// Minimum-cost assignment. Among assignments that pair the largest possible
/// number of non-forbidden entries, returns one of minimum total cost;
/// forbidden entries are never assigned.
Assignment hungarian(const CostMatrix& cost);

}  // namespace resmot
