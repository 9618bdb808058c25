#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "resmot/heatmap.hpp"
#include "resmot/hungarian.hpp"
#include "resmot/selector.hpp"

namespace oracle {

// Exhaustive search over injective row->column maps. Returns the number of
// allowed pairs and the minimum cost among maps achieving that number.
struct BruteAssignment {
  int pairs = 0;
  double cost = 0.0;
};

inline BruteAssignment brute_force_assignment(const resmot::CostMatrix& c) {
  const int rows = c.rows();
  const int cols = c.cols();
  BruteAssignment best{-1, 0.0};
  std::vector<int> used(static_cast<std::size_t>(cols), 0);
  std::function<void(int, int, double)> rec = [&](int r, int pairs, double cost) {
    if (r == rows) {
      if (pairs > best.pairs || (pairs == best.pairs && cost < best.cost - 1e-12)) {
        best = {pairs, cost};
      }
      return;
    }
    rec(r + 1, pairs, cost);  // leave row unassigned
    for (int j = 0; j < cols; ++j) {
      if (used[j] || std::isinf(c(r, j))) continue;
      used[j] = 1;
      rec(r + 1, pairs + 1, cost + c(r, j));
      used[j] = 0;
    }
  };
  rec(0, 0, 0.0);
  return best;
}

// Central finite difference of f at x with step h.
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Fourth-order central difference of f at x with step h.
inline double five_point_difference(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

// Literal transcription of the selection rule: walk candidates from the
// smallest, return the first enabled one whose ratio meets its threshold.
inline int first_satisfier(const resmot::HeatmapStack& stack, const resmot::ResolutionPolicy& p) {
  const auto& full = stack.back();
  for (std::size_t i = 0; i + 1 < p.ladder.size(); ++i) {
    if (!p.thresholds[i]) continue;
    double inter = 0.0, active = 0.0;
    for (std::size_t k = 0; k < full.size(); ++k) {
      const bool f = full.values()[k] >= p.binarize_tau;
      const bool c = stack[i].values()[k] >= p.binarize_tau;
      active += f;
      inter += f && c;
    }
    const double ratio = active == 0.0 ? 1.0 : inter / active;
    if (ratio >= *p.thresholds[i]) return static_cast<int>(i);
  }
  return static_cast<int>(p.ladder.size()) - 1;
}

inline double gaussian(double dx, double dy, double sigma) {
  return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

}  // namespace oracle
