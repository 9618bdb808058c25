#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "resmot/types.hpp"

namespace resmot {

/// Output stride between full-resolution pixels and heatmap cells.
inline constexpr int kHeatmapStride = 4;
/// Lower bound on the Gaussian kernel width, in grid cells.
inline constexpr double kSigmaFloor = 0.5;
/// Predictions are clamped into [eps, 1 - eps] before taking logarithms.
inline constexpr double kPredictionEps = 1e-6;

/// Row-major grid of unit-interval values, `rows` x `cols` cells.
class Heatmap {
 public:
  Heatmap() = default;
  Heatmap(int rows, int cols, double fill = 0.0);

  /// Grid covering a full-resolution frame at the fixed stride.
  static Heatmap for_frame(const Resolution& full);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& at(int row, int col) { return values_[static_cast<std::size_t>(row) * cols_ + col]; }
  double at(int row, int col) const { return values_[static_cast<std::size_t>(row) * cols_ + col]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool same_shape(const Heatmap& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool operator==(const Heatmap&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
};

/// One heatmap per ladder resolution, index-aligned with the ladder.
using HeatmapStack = std::vector<Heatmap>;

struct LossWeights {
  double alpha = 2.0;
  double beta = 4.0;
  double lambda = 1.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
};

/// Kernel width for an object seen at `resolution`, in grid cells.
///
/// The box is shrunk by the linear scale of `resolution` relative to `full`,
/// then sigma = max(kSigmaFloor, (w_r + h_r) / (6 * stride)).
double sigma_for(const BoundingBox& box, const Resolution& resolution, const Resolution& full,
                 int stride = kHeatmapStride);

/// Renders one Gaussian per object centre on the full-frame grid. Each object
/// peaks at exactly 1 on the cell containing its centre; overlapping kernels
/// combine by element-wise maximum.
Heatmap render_gt_heatmap(std::span<const BoundingBox> objects, const Resolution& resolution,
                          const Resolution& full);

/// Stamps a single kernel into `map` with an explicit sigma.
void draw_gaussian(Heatmap& map, double cx, double cy, double sigma, int stride = kHeatmapStride);

/// Pixel-wise focal loss over every (resolution, row, col). Cells whose
/// target equals exactly 1 use the positive branch. Returns 0 for n_objects == 0.
double detectability_loss(const HeatmapStack& pred, const HeatmapStack& gt,
                          const LossWeights& weights, int n_objects);

/// d(detectability_loss)/d(pred), same shape as `pred`. Zero where the
/// prediction lies outside the clamp interval.
HeatmapStack loss_gradient(const HeatmapStack& pred, const HeatmapStack& gt,
                           const LossWeights& weights, int n_objects);

struct DetectionLossTerms {
  double heatmap = 0.0;
  double box = 0.0;
  double identity = 0.0;
};

/// Uncertainty-weighted detection loss plus lambda * detectability.
double joint_loss(const DetectionLossTerms& terms, double detectability,
                  const LossWeights& weights);

/// Plain-text grid: "rows cols" header line then one line per row.
void write_heatmap(std::ostream& out, const Heatmap& map);
Heatmap read_heatmap(std::istream& in);

/// "stack R" header followed by R heatmaps.
void write_stack(std::ostream& out, const HeatmapStack& stack);
HeatmapStack read_stack(std::istream& in);

}  // namespace resmot
