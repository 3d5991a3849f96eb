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

#ifndef PILEVOL_FRAMES_HPP
#define PILEVOL_FRAMES_HPP

#include <functional>
#include <optional>

#include <Eigen/Core>

#include "pilevol/errors.hpp"

namespace pilevol {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Rotation from roll/pitch/yaw, Z-Y-X convention: R = Rz(yaw) Ry(pitch) Rx(roll).
Eigen::Matrix3d rotation_from_rpy(double roll, double pitch, double yaw);

/// Wraps an angle into (-pi, pi].
double wrap_pi(double angle);
/// Wraps an angle into [0, 2 pi).
double wrap_two_pi(double angle);

/**
 * @brief Rigid transform mapping child-frame coordinates into the parent frame.
 *
 *   p_parent = rotation * p_child + translation
 */
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform from_rpy(const Eigen::Vector3d& translation, double roll,
                                 double pitch, double yaw);

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
  Eigen::Vector3d apply_inverse(const Eigen::Vector3d& p) const {
    return rotation.transpose() * (p - translation);
  }
  RigidTransform inverse() const;
  /// (*this) * other: first other, then *this.
  RigidTransform compose(const RigidTransform& other) const;
};

/**
 * @brief Drone pose: global position and roll/pitch/yaw orientation.
 *
 * The orientation maps body-frame vectors into the global frame.  Body frame is
 * x forward, y left, z up.
 */
struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  static Pose from_vector(const Vector6d& v);
  /// [x, y, z, roll, pitch, yaw]
  Vector6d as_vector() const;

  /// yaw into [0, 2 pi), roll and pitch into (-pi, pi].
  Pose normalized() const;
  Eigen::Matrix3d rotation() const { return rotation_from_rpy(roll, pitch, yaw); }
  RigidTransform body_to_world() const { return {rotation(), position}; }
};

/// 6x6 pose covariance in the [x, y, z, roll, pitch, yaw] ordering.
struct PoseCovariance {
  Matrix6d matrix = Matrix6d::Zero();

  double trace() const { return matrix.trace(); }
  bool is_symmetric(double rel_tol = 1e-12) const;
  bool is_psd(double rel_tol = 1e-9) const;
};

/**
 * @brief Pinhole camera rigidly mounted on the drone.
 *
 * Camera frame convention: +z forward along the optical axis, +x right, +y down.
 * `mount` maps camera-frame points into the body frame.
 */
struct CameraModel {
  double fx = 400.0;
  double fy = 400.0;
  double cx = 320.0;
  double cy = 240.0;
  double width = 640.0;
  double height = 480.0;
  double pixel_sigma = 1.0;
  RigidTransform mount = front_facing_mount();

  /// Optical axis along body +x, image right along body -y.
  static RigidTransform front_facing_mount();
  void validate() const;
};

struct Projection {
  Eigen::Vector2d pixel;
  bool in_bounds = false;
};

Eigen::Vector3d world_to_camera(const Pose& pose, const CameraModel& camera,
                                const Eigen::Vector3d& point_world);
Eigen::Vector3d camera_to_world(const Pose& pose, const CameraModel& camera,
                                const Eigen::Vector3d& point_camera);

/// Pinhole projection; std::nullopt when the point is not in front of the camera.
std::optional<Projection> project(const CameraModel& camera, const Eigen::Vector3d& point_camera);

using VectorFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline constexpr double kDefaultJacobianStep = 1e-6;

/**
 * @brief Central-difference Jacobian of `fn` at `at`.
 *
 * Throws NumericError when `fn` is non-finite at any probe point.
 */
Eigen::MatrixXd numeric_jacobian(const VectorFunction& fn, const Eigen::VectorXd& at,
                                 double step = kDefaultJacobianStep);

}  // namespace pilevol

#endif  // PILEVOL_FRAMES_HPP
