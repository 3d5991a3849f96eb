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

#ifndef PILEVOL_LIDAR_HPP
#define PILEVOL_LIDAR_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "pilevol/frames.hpp"

namespace pilevol {

/**
 * @brief Planar rotating 2D LiDAR.
 *
 * In the sensor frame the beam at angle alpha points along
 * (0, sin(alpha), -cos(alpha)): alpha = 0 is straight down and the scan plane
 * is the sensor y-z plane.  `mount` maps sensor-frame points into the body frame.
 */
struct LidarModel {
  RigidTransform mount;
  double angular_resolution = 0.5 * 3.14159265358979323846 / 180.0;  // [rad]
  double scan_rate = 10000.0;                                          // [samples/s]
  double d_min = 0.5;                                                  // [m]
  double d_max = 10.0;                                                 // [m]
  double angle_variance = (0.1 * 3.14159265358979323846 / 180.0) *
                          (0.1 * 3.14159265358979323846 / 180.0);      // [rad^2]
  double range_variance = 0.02 * 0.02;                                 // [m^2]

  void validate() const;
  /// Discrete beam angles of one revolution, in increasing order from 0.
  std::vector<double> sweep_angles() const;
};

struct SurfaceMeasurement {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();          ///< hit point, global frame [m]
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();     ///< [m^2]
  double height_variance = 0.0;                             ///< condensed height variance [m^2]
  double alpha = 0.0;                                       ///< reported beam angle [rad]
  double range = 0.0;                                       ///< reported range [m]
};

/// Distance along a unit ray to the first surface hit within max_range, or nullopt.
using RangeOracle = std::function<std::optional<double>(
    const Eigen::Vector3d& origin, const Eigen::Vector3d& direction, double max_range)>;

Eigen::Vector3d beam_direction_sensor(double alpha);
Eigen::Vector3d beam_direction_world(const Pose& pose, const LidarModel& lidar, double alpha);
Eigen::Vector3d sensor_origin_world(const Pose& pose, const LidarModel& lidar);

/// Global hit point of a return at range d_l. Throws OutOfRange outside [d_min, d_max].
Eigen::Vector3d hit_point(const Pose& pose, const LidarModel& lidar, double alpha, double d_l);

/**
 * First-order covariance of the hit point:
 *
 *   J_pose cov J_pose^T + J_alpha var_alpha J_alpha^T + u var_range u^T
 *
 * with u the unit beam direction in the global frame.
 */
Eigen::Matrix3d measurement_covariance(const Pose& pose, const PoseCovariance& cov,
                                       const LidarModel& lidar, double alpha, double d_l);

/// [s s 1] cov [s s 1]^T, s the terrain slope standard deviation.
double condense_to_height(const Eigen::Matrix3d& measurement_cov, double slope_sigma);

/**
 * One revolution from a frozen pose.  Beams are ray-cast from `true_pose`;
 * range and angle noise are added; the returns are then registered with
 * `estimated_pose` and its covariance.  Output is in beam-angle order and is
 * deterministic for a given seed.
 */
std::vector<SurfaceMeasurement> scan_sweep(const Pose& true_pose, const Pose& estimated_pose,
                                           const PoseCovariance& estimated_cov,
                                           const LidarModel& lidar, const RangeOracle& terrain,
                                           double slope_sigma, std::uint64_t seed);

}  // namespace pilevol

#endif  // PILEVOL_LIDAR_HPP
