#include "resmot/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace resmot {

namespace {

void check_aligned(const HeatmapStack& pred, const HeatmapStack& gt) {
  if (pred.size() != gt.size()) throw Error("heatmap", "stack depth mismatch");
  for (std::size_t r = 0; r < pred.size(); ++r) {
    if (!pred[r].same_shape(gt[r])) throw Error("heatmap", "heatmap shape mismatch");
  }
}

double clamp_pred(double p) { return std::clamp(p, kPredictionEps, 1.0 - kPredictionEps); }

}  // namespace

Heatmap::Heatmap(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw Error("heatmap", "heatmap dimensions must be positive");
  values_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

Heatmap Heatmap::for_frame(const Resolution& full) {
  if (full.width % kHeatmapStride != 0 || full.height % kHeatmapStride != 0) {
    throw Error("heatmap", "resolution " + full.to_string() + " not divisible by stride");
  }
  return Heatmap(full.height / kHeatmapStride, full.width / kHeatmapStride);
}

double sigma_for(const BoundingBox& box, const Resolution& resolution, const Resolution& full,
                 int stride) {
  const double scale = std::sqrt(static_cast<double>(resolution.area()) / full.area());
  const double w_r = box.w * scale;
  const double h_r = box.h * scale;
  return std::max(kSigmaFloor, (w_r + h_r) / (6.0 * stride));
}

void draw_gaussian(Heatmap& map, double cx, double cy, double sigma, int stride) {
  const int col = std::clamp(static_cast<int>(std::floor(cx / stride)), 0, map.cols() - 1);
  const int row = std::clamp(static_cast<int>(std::floor(cy / stride)), 0, map.rows() - 1);
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const double denom = 2.0 * sigma * sigma;
  const int r0 = std::max(0, row - radius), r1 = std::min(map.rows() - 1, row + radius);
  const int c0 = std::max(0, col - radius), c1 = std::min(map.cols() - 1, col + radius);
  for (int r = r0; r <= r1; ++r) {
    const double dy = r - row;
    for (int c = c0; c <= c1; ++c) {
      const double dx = c - col;
      const double v = std::exp(-(dx * dx + dy * dy) / denom);
      double& cell = map.at(r, c);
      cell = std::max(cell, v);
    }
  }
}

Heatmap render_gt_heatmap(std::span<const BoundingBox> objects, const Resolution& resolution,
                          const Resolution& full) {
  Heatmap map = Heatmap::for_frame(full);
  for (const auto& box : objects) {
    draw_gaussian(map, box.cx, box.cy, sigma_for(box, resolution, full));
  }
  return map;
}

double detectability_loss(const HeatmapStack& pred, const HeatmapStack& gt,
                          const LossWeights& weights, int n_objects) {
  check_aligned(pred, gt);
  if (n_objects <= 0) return 0.0;
  double sum = 0.0;
  for (std::size_t r = 0; r < pred.size(); ++r) {
    const auto p = pred[r].values();
    const auto y = gt[r].values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double yh = clamp_pred(p[i]);
      if (y[i] == 1.0) {
        sum += std::pow(1.0 - yh, weights.alpha) * std::log(yh);
      } else {
        sum += std::pow(1.0 - y[i], weights.beta) * std::pow(yh, weights.alpha) *
               std::log(1.0 - yh);
      }
    }
  }
  return -sum / n_objects;
}

HeatmapStack loss_gradient(const HeatmapStack& pred, const HeatmapStack& gt,
                           const LossWeights& weights, int n_objects) {
  check_aligned(pred, gt);
  HeatmapStack grad;
  grad.reserve(pred.size());
  for (const auto& p : pred) grad.emplace_back(p.rows(), p.cols());
  if (n_objects <= 0) return grad;
  const double a = weights.alpha;
  for (std::size_t r = 0; r < pred.size(); ++r) {
    const auto p = pred[r].values();
    const auto y = gt[r].values();
    auto g = grad[r].values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double yh = p[i];
      // the clamp is flat outside its interval
      if (yh < kPredictionEps || yh > 1.0 - kPredictionEps) continue;
      double d;
      if (y[i] == 1.0) {
        // d/dp [(1-p)^a log p]
        d = -a * std::pow(1.0 - yh, a - 1.0) * std::log(yh) + std::pow(1.0 - yh, a) / yh;
      } else {
        // d/dp [(1-y)^b p^a log(1-p)]
        d = std::pow(1.0 - y[i], weights.beta) *
            (a * std::pow(yh, a - 1.0) * std::log(1.0 - yh) - std::pow(yh, a) / (1.0 - yh));
      }
      g[i] = -d / n_objects;
    }
  }
  return grad;
}

double joint_loss(const DetectionLossTerms& terms, double detectability,
                  const LossWeights& weights) {
  const double detection =
      0.5 * (std::exp(-weights.omega1) * (terms.heatmap + terms.box) +
             std::exp(-weights.omega2) * terms.identity + weights.omega1 + weights.omega2);
  return detection + weights.lambda * detectability;
}

void write_heatmap(std::ostream& out, const Heatmap& map) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << map.rows() << ' ' << map.cols() << '\n';
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      if (c) out << ' ';
      out << map.at(r, c);
    }
    out << '\n';
  }
  out.precision(old);
}

Heatmap read_heatmap(std::istream& in) {
  int rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw Error("heatmap", "bad heatmap header");
  }
  Heatmap map(rows, cols);
  for (double& v : map.values()) {
    if (!(in >> v)) throw Error("heatmap", "truncated heatmap body");
    if (!(v >= 0.0 && v <= 1.0)) throw Error("heatmap", "heatmap value outside [0,1]");
  }
  return map;
}

void write_stack(std::ostream& out, const HeatmapStack& stack) {
  out << "stack " << stack.size() << '\n';
  for (const auto& m : stack) write_heatmap(out, m);
}

HeatmapStack read_stack(std::istream& in) {
  std::string tag;
  std::size_t depth = 0;
  if (!(in >> tag >> depth) || tag != "stack") throw Error("heatmap", "bad stack header");
  HeatmapStack stack;
  for (std::size_t i = 0; i < depth; ++i) {
    stack.push_back(read_heatmap(in));
    if (!stack.back().same_shape(stack.front())) {
      throw Error("heatmap", "stack members differ in shape");
    }
  }
  return stack;
}

}  // namespace resmot
