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

#include "pilevol/frames.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

namespace pilevol {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

Eigen::Matrix3d rotation_from_rpy(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

double wrap_pi(double angle) {
  double r = std::remainder(angle, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

RigidTransform RigidTransform::from_rpy(const Eigen::Vector3d& translation, double roll,
                                        double pitch, double yaw) {
  return {rotation_from_rpy(roll, pitch, yaw), translation};
}

RigidTransform RigidTransform::inverse() const {
  const Eigen::Matrix3d rt = rotation.transpose();
  return {rt, -rt * translation};
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
  return {rotation * other.rotation, rotation * other.translation + translation};
}

Pose Pose::from_vector(const Vector6d& v) {
  Pose p;
  p.position = v.head<3>();
  p.roll = v[3];
  p.pitch = v[4];
  p.yaw = v[5];
  return p;
}

Vector6d Pose::as_vector() const {
  Vector6d v;
  v << position, roll, pitch, yaw;
  return v;
}

Pose Pose::normalized() const {
  Pose p = *this;
  p.roll = wrap_pi(roll);
  p.pitch = wrap_pi(pitch);
  p.yaw = wrap_two_pi(yaw);
  return p;
}

bool PoseCovariance::is_symmetric(double rel_tol) const {
  const double scale = std::max(matrix.cwiseAbs().maxCoeff(), 1e-300);
  return (matrix - matrix.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool PoseCovariance::is_psd(double rel_tol) const {
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(0.5 * (matrix + matrix.transpose()),
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -rel_tol * std::abs(matrix.trace());
}

RigidTransform CameraModel::front_facing_mount() {
  // Columns are the camera axes expressed in the body frame.
  Eigen::Matrix3d r;
  r << 0.0, 0.0, 1.0,
      -1.0, 0.0, 0.0,
      0.0, -1.0, 0.0;
  return {r, Eigen::Vector3d::Zero()};
}

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw ConfigError("camera focal lengths must be positive");
  if (!(width > 0.0) || !(height > 0.0)) throw ConfigError("camera image bounds must be positive");
  if (!(pixel_sigma >= 0.0)) throw ConfigError("camera pixel sigma must be non-negative");
}

Eigen::Vector3d world_to_camera(const Pose& pose, const CameraModel& camera,
                                const Eigen::Vector3d& point_world) {
  const Eigen::Vector3d body = pose.body_to_world().apply_inverse(point_world);
  return camera.mount.apply_inverse(body);
}

Eigen::Vector3d camera_to_world(const Pose& pose, const CameraModel& camera,
                                const Eigen::Vector3d& point_camera) {
  return pose.body_to_world().apply(camera.mount.apply(point_camera));
}

std::optional<Projection> project(const CameraModel& camera, const Eigen::Vector3d& point_camera) {
  if (!(point_camera.z() > 0.0)) return std::nullopt;
  Projection out;
  out.pixel = {camera.fx * point_camera.x() / point_camera.z() + camera.cx,
               camera.fy * point_camera.y() / point_camera.z() + camera.cy};
  out.in_bounds = out.pixel.x() >= 0.0 && out.pixel.x() <= camera.width &&
                  out.pixel.y() >= 0.0 && out.pixel.y() <= camera.height;
  return out;
}

Eigen::MatrixXd numeric_jacobian(const VectorFunction& fn, const Eigen::VectorXd& at,
                                 double step) {
  if (!(step > 0.0)) throw NumericError("jacobian step must be positive");
  Eigen::MatrixXd jac;
  Eigen::VectorXd probe = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    probe[i] = at[i] + step;
    const Eigen::VectorXd plus = fn(probe);
    probe[i] = at[i] - step;
    const Eigen::VectorXd minus = fn(probe);
    probe[i] = at[i];
    if (!plus.allFinite() || !minus.allFinite() || plus.size() != minus.size()) {
      throw NumericError("function is not finite at a jacobian probe point");
    }
    if (i == 0) jac.resize(plus.size(), at.size());
    jac.col(i) = (plus - minus) / (2.0 * step);
  }
  return jac;
}

}  // namespace pilevol
