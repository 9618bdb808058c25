#include "resmot/hungarian.hpp"

#include <algorithm>
#include <cmath>

#include "resmot/types.hpp"

namespace resmot {

std::vector<std::pair<int, int>> Assignment::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < static_cast<int>(row_to_col.size()); ++r) {
    if (row_to_col[r] >= 0) out.emplace_back(r, row_to_col[r]);
  }
  return out;
}

Assignment hungarian(const CostMatrix& cost) {
  Assignment result;
  result.row_to_col.assign(static_cast<std::size_t>(cost.rows()), -1);
  if (cost.empty()) return result;

  const int rows = cost.rows();
  const int cols = cost.cols();
  const int n = std::max(rows, cols);

  double lo = kForbidden, hi = -kForbidden;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = cost(r, c);
      if (std::isnan(v) || v == -kForbidden) throw Error("tracker", "invalid assignment cost");
      if (v == kForbidden) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo == kForbidden) return result;  // nothing assignable

  // Shift finite costs into [0, range]; a forbidden entry costs more than any
  // full assignment of finite entries, so cardinality is maximised first.
  const double range = hi - lo;
  const double big = (range + 1.0) * (n + 1);
  auto a = [&](int r, int c) -> double {
    if (r >= rows || c >= cols) return 0.0;
    const double v = cost(r, c);
    return v == kForbidden ? big : v - lo;
  };

  // Potentials-based shortest augmenting path, 1-indexed with a sentinel column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kForbidden);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kForbidden;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
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
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= n; ++j) {
    const int r = p[j] - 1;
    const int c = j - 1;
    if (r < rows && c < cols && cost(r, c) != kForbidden) {
      result.row_to_col[r] = c;
      result.total_cost += cost(r, c);
    }
  }
  return result;
}

}  // namespace resmot
