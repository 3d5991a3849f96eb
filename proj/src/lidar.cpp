// Copyright 2026 The pilevol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pilevol/lidar.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "pilevol/random.hpp"

namespace pilevol {

namespace {

Eigen::Vector3d hit_point_unchecked(const Pose& pose, const LidarModel& lidar, double alpha,
                                    double d_l) {
  return pose.body_to_world().apply(lidar.mount.apply(d_l * beam_direction_sensor(alpha)));
}

}  // namespace

void LidarModel::validate() const {
  if (!(d_min > 0.0) || !(d_max > d_min)) throw ConfigError("lidar needs 0 < d_min < d_max");
  if (!(angular_resolution > 0.0)) throw ConfigError("lidar angular resolution must be positive");
  if (!(angle_variance >= 0.0) || !(range_variance >= 0.0)) {
    throw ConfigError("lidar noise variances must be non-negative");
  }
}

std::vector<double> LidarModel::sweep_angles() const {
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::round(2.0 * std::numbers::pi / angular_resolution)));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 2.0 * std::numbers::pi * i / n;
  return out;
}

Eigen::Vector3d beam_direction_sensor(double alpha) {
  return {0.0, std::sin(alpha), -std::cos(alpha)};
}

Eigen::Vector3d beam_direction_world(const Pose& pose, const LidarModel& lidar, double alpha) {
  return pose.rotation() * (lidar.mount.rotation * beam_direction_sensor(alpha));
}

Eigen::Vector3d sensor_origin_world(const Pose& pose, const LidarModel& lidar) {
  return pose.body_to_world().apply(lidar.mount.translation);
}

Eigen::Vector3d hit_point(const Pose& pose, const LidarModel& lidar, double alpha, double d_l) {
  if (!(d_l >= lidar.d_min && d_l <= lidar.d_max)) {
    throw OutOfRange("lidar range " + std::to_string(d_l) + " outside [" +
                     std::to_string(lidar.d_min) + ", " + std::to_string(lidar.d_max) + "]");
  }
  return hit_point_unchecked(pose, lidar, alpha, d_l);
}

Eigen::Matrix3d measurement_covariance(const Pose& pose, const PoseCovariance& cov,
                                       const LidarModel& lidar, double alpha, double d_l) {
  hit_point(pose, lidar, alpha, d_l);  // range check

  const Eigen::MatrixXd j_pose = numeric_jacobian(
      [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return hit_point_unchecked(Pose::from_vector(x), lidar, alpha, d_l);
      },
      pose.as_vector());
  Eigen::VectorXd a(1);
  a[0] = alpha;
  const Eigen::MatrixXd j_alpha = numeric_jacobian(
      [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return hit_point_unchecked(pose, lidar, x[0], d_l);
      },
      a);
  const Eigen::Vector3d u = beam_direction_world(pose, lidar, alpha);

  Eigen::Matrix3d sigma = j_pose * cov.matrix * j_pose.transpose();
  sigma += lidar.angle_variance * (j_alpha * j_alpha.transpose());
  sigma += lidar.range_variance * (u * u.transpose());
  return 0.5 * (sigma + sigma.transpose());
}

double condense_to_height(const Eigen::Matrix3d& measurement_cov, double slope_sigma) {
  const Eigen::Vector3d v(slope_sigma, slope_sigma, 1.0);
  return v.dot(measurement_cov * v);
}

std::vector<SurfaceMeasurement> scan_sweep(const Pose& true_pose, const Pose& estimated_pose,
                                           const PoseCovariance& estimated_cov,
                                           const LidarModel& lidar, const RangeOracle& terrain,
                                           double slope_sigma, std::uint64_t seed) {
  const Eigen::Vector3d origin = sensor_origin_world(true_pose, lidar);
  const double range_sigma = std::sqrt(lidar.range_variance);
  const double angle_sigma = std::sqrt(lidar.angle_variance);
  const auto angles = lidar.sweep_angles();

  std::vector<SurfaceMeasurement> out;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double alpha = angles[i];
    const auto range = terrain(origin, beam_direction_world(true_pose, lidar, alpha), lidar.d_max);
    if (!range || *range < lidar.d_min || *range > lidar.d_max) continue;

    std::mt19937_64 rng(substream_seed(seed, {i}));
    std::normal_distribution<double> unit(0.0, 1.0);
    const double d_noise = unit(rng);
    const double a_noise = unit(rng);
    const double d_l = *range + range_sigma * d_noise;
    const double reported_alpha = alpha + angle_sigma * a_noise;
    if (d_l < lidar.d_min || d_l > lidar.d_max) continue;

    SurfaceMeasurement m;
    m.alpha = reported_alpha;
    m.range = d_l;
    m.point = hit_point(estimated_pose, lidar, reported_alpha, d_l);
    m.covariance = measurement_covariance(estimated_pose, estimated_cov, lidar, reported_alpha, d_l);
    m.height_variance = condense_to_height(m.covariance, slope_sigma);
    out.push_back(m);
  }
  return out;
}

}  // namespace pilevol
