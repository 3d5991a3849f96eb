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

#ifndef PILEVOL_LOCALIZATION_HPP
#define PILEVOL_LOCALIZATION_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "pilevol/frames.hpp"

namespace pilevol {

struct Feature {
  int id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

/// Mapped visual features in the global frame. Ids are unique.
class FeatureMap {
 public:
  FeatureMap() = default;
  explicit FeatureMap(std::vector<Feature> features);

  void add(const Feature& feature);
  const std::vector<Feature>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  bool empty() const { return features_.empty(); }
  /// Index into features(), or nullopt.
  std::optional<std::size_t> find(int id) const;

 private:
  std::vector<Feature> features_;
};

struct Detection {
  int id = 0;
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
};

using DetectionSet = std::vector<Detection>;

/// Returns true when the segment between the two world points is blocked.
using OcclusionTest = std::function<bool(const Eigen::Vector3d&, const Eigen::Vector3d&)>;

/// Axis-aligned configuration-space box plus yaw range.
struct ConfigurationBounds {
  Eigen::Vector3d min = Eigen::Vector3d::Constant(-1e9);
  Eigen::Vector3d max = Eigen::Vector3d::Constant(1e9);
  double yaw_min = 0.0;
  double yaw_max = 2.0 * 3.14159265358979323846;

  bool contains(const Pose& pose) const;
};

struct FeasibilityConfig {
  double tau = 0.5;
  int min_features = 4;
  ConfigurationBounds bounds;
  /// Diagonal weights applied inside the quality-of-fix trace. All ones is the
  /// plain unweighted trace.
  Vector6d trace_weights = Vector6d::Ones();

  void validate() const;
};

struct LmOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-10;
  double relative_cost_tolerance = 1e-12;
  double max_condition = 1e12;
  double initial_lambda = 1e-3;
};

struct PoseEstimate {
  Pose pose;
  PoseCovariance covariance;
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
};

/// Indices (into map.features()) of features in front of the camera and inside the image.
std::vector<std::size_t> visible_features(const Pose& pose, const FeatureMap& map,
                                          const CameraModel& camera,
                                          const OcclusionTest& occluded = {});

/**
 * Noisy pixel detections of every visible feature, with isotropic Gaussian
 * noise of camera.pixel_sigma.  Detections pushed out of the image by the noise
 * are dropped.  Deterministic for a given seed.
 */
DetectionSet simulate_detections(const Pose& pose, const FeatureMap& map,
                                 const CameraModel& camera, std::uint64_t noise_seed,
                                 const OcclusionTest& occluded = {});

/**
 * Levenberg-Marquardt fit of the 6-DoF pose to the detections, minimizing the
 * summed squared reprojection error.  The covariance is sigma^2 (J^T J)^-1 at
 * the solution.
 *
 * Throws InsufficientDetections, SingularGeometry or NoConvergence.
 */
PoseEstimate estimate_pose(const DetectionSet& detections, const FeatureMap& map,
                           const CameraModel& camera, const Pose& initial_guess,
                           int min_detections = 4, const LmOptions& options = {});

/// 1 / sqrt(trace(cov)). Throws InvalidCovariance when the trace is not positive.
double quality_of_fix(const PoseCovariance& cov);
double quality_of_fix(const PoseCovariance& cov, const Vector6d& trace_weights);

/// sigma^2 (J^T J)^-1 from noise-free projections at the given pose.
PoseCovariance predicted_covariance(const Pose& pose, const FeatureMap& map,
                                    const CameraModel& camera, int min_features = 4,
                                    double max_condition = 1e12);

/// Inside the bounds, enough visible features, and quality of fix above tau.
bool in_cfree(const Pose& pose, const FeatureMap& map, const CameraModel& camera,
              const FeasibilityConfig& cfg);

struct LatticeSpec {
  double x_min = 0.0;
  double x_max = 1.0;
  int nx = 2;
  double y_min = 0.0;
  double y_max = 1.0;
  int ny = 2;

  double x(int i) const { return nx == 1 ? x_min : x_min + (x_max - x_min) * i / (nx - 1); }
  double y(int j) const { return ny == 1 ? y_min : y_min + (y_max - y_min) * j / (ny - 1); }
};

/// Quality of fix over a horizontal lattice; nullopt marks poses where it is undefined.
struct QualityField {
  LatticeSpec lattice;
  /// Row-major over y: values[j * nx + i].
  std::vector<std::optional<double>> values;

  const std::optional<double>& at(int i, int j) const {
    return values[static_cast<std::size_t>(j) * lattice.nx + i];
  }
};

QualityField quality_map(const FeatureMap& map, const CameraModel& camera, double z, double yaw,
                         const LatticeSpec& lattice, int min_features = 4,
                         unsigned threads = 1);

}  // namespace pilevol

#endif  // PILEVOL_LOCALIZATION_HPP
