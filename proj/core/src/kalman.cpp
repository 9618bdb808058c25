#include "resmot/kalman.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

namespace resmot {

namespace {

using Vector4 = Eigen::Matrix<double, 4, 1>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;
using Matrix48 = Eigen::Matrix<double, 4, 8>;

// keeps the innovation covariance invertible when noise_scale is 0
constexpr double kMinMeasurementVariance = 1e-12;
constexpr double kMinHeight = 1e-3;

Matrix8 transition() {
  Matrix8 f = Matrix8::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

Matrix48 observation_matrix() {
  Matrix48 h = Matrix48::Zero();
  for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
  return h;
}

Vector4 measure(const BoundingBox& b) { return {b.cx, b.cy, b.w / b.h, b.h}; }

}  // namespace

BoundingBox KalmanState::box() const {
  const double h = std::max(mean(3), kMinHeight);
  return {mean(0), mean(1), mean(2) * h, h};
}

KalmanState kalman_initiate(const BoundingBox& observation, const KalmanParams& params) {
  if (!observation.valid()) throw Error("tracker", "invalid observation for track start");
  KalmanState s;
  s.mean.head<4>() = measure(observation);
  const double h = observation.h;
  const double pos = params.init_position_weight * h;
  const double vel = params.init_velocity_weight * h;
  Vector8 std;
  std << pos, pos, 1e-2, pos, vel, vel, 1e-5, vel;
  s.covariance = std.array().square().matrix().asDiagonal();
  return s;
}

KalmanState kalman_predict(const KalmanState& state, const KalmanParams& params) {
  static const Matrix8 f = transition();
  const double h = state.mean(3);
  const double pos = params.std_weight_position * h;
  const double vel = params.std_weight_velocity * h;
  Vector8 std;
  std << pos, pos, 1e-2, pos, vel, vel, 1e-5, vel;
  const Vector8 q = std.array().square().matrix() * params.noise_scale;

  KalmanState out;
  out.mean = f * state.mean;
  out.covariance = f * state.covariance * f.transpose();
  out.covariance.diagonal() += q;
  return out;
}

KalmanState kalman_update(const KalmanState& state, const BoundingBox& observation,
                          const KalmanParams& params) {
  if (!observation.valid()) throw Error("tracker", "non-finite or degenerate observation");
  static const Matrix48 hm = observation_matrix();
  const double h = state.mean(3);
  const double pos = params.std_weight_position * h;
  Vector4 r;
  r << pos * pos, pos * pos, 1e-1 * 1e-1, pos * pos;
  r = (r * params.noise_scale).cwiseMax(kMinMeasurementVariance);

  const Matrix4 s = hm * state.covariance * hm.transpose() + Matrix4(r.asDiagonal());
  const Eigen::Matrix<double, 8, 4> pht = state.covariance * hm.transpose();
  const Eigen::Matrix<double, 8, 4> gain = s.ldlt().solve(pht.transpose()).transpose();
  const Vector4 innovation = measure(observation) - hm * state.mean;

  KalmanState out;
  out.mean = state.mean + gain * innovation;
  out.covariance = state.covariance - gain * s * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  out.mean(3) = std::max(out.mean(3), kMinHeight);
  return out;
}

}  // namespace resmot
