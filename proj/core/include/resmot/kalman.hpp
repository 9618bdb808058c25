#pragma once

#include <Eigen/Core>

#include "resmot/types.hpp"

namespace resmot {

using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix8 = Eigen::Matrix<double, 8, 8>;

/// Noise parameterisation; standard deviations scale with box height.
struct KalmanParams {
  double std_weight_position = 1.0 / 20.0;
  double std_weight_velocity = 1.0 / 160.0;
  double init_position_weight = 2.0 / 20.0;
  double init_velocity_weight = 10.0 / 160.0;
  /// Multiplies process and measurement variances; 0 models a noiseless target.
  double noise_scale = 1.0;

  static KalmanParams noiseless() {
    KalmanParams p;
    p.noise_scale = 0.0;
    return p;
  }
};

/// Constant-velocity state over (cx, cy, aspect = w/h, h) and their rates.
struct KalmanState {
  Vector8 mean = Vector8::Zero();
  Matrix8 covariance = Matrix8::Identity();

  BoundingBox box() const;
};

KalmanState kalman_initiate(const BoundingBox& observation, const KalmanParams& params = {});

/// One-frame constant-velocity prediction.
KalmanState kalman_predict(const KalmanState& state, const KalmanParams& params = {});

/// Linear-Gaussian correction with a box observation. Throws on a
/// non-finite or degenerate observation.
KalmanState kalman_update(const KalmanState& state, const BoundingBox& observation,
                          const KalmanParams& params = {});

}  // namespace resmot
