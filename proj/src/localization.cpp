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

#include "pilevol/localization.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "pilevol/parallel.hpp"

namespace pilevol {

namespace {

// Near this pitch the roll/yaw parameterization degenerates.
constexpr double kGimbalMargin = 1e-3;

Eigen::Vector2d pinhole(const CameraModel& camera, const Eigen::Vector3d& pc) {
  return {camera.fx * pc.x() / pc.z() + camera.cx, camera.fy * pc.y() / pc.z() + camera.cy};
}

// Stacked projections of `points` at pose vector p. Non-finite if any point is
// not in front of the camera.
Eigen::VectorXd stacked_projections(const Vector6d& p, const CameraModel& camera,
                                    const std::vector<Eigen::Vector3d>& points) {
  const Pose pose = Pose::from_vector(p);
  Eigen::VectorXd out(2 * points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Eigen::Vector3d pc = world_to_camera(pose, camera, points[k]);
    if (!(pc.z() > 0.0)) {
      out.segment<2>(2 * k).setConstant(std::numeric_limits<double>::quiet_NaN());
    } else {
      out.segment<2>(2 * k) = pinhole(camera, pc);
    }
  }
  return out;
}

Eigen::MatrixXd projection_jacobian(const Vector6d& p, const CameraModel& camera,
                                    const std::vector<Eigen::Vector3d>& points) {
  return numeric_jacobian(
      [&](const Eigen::VectorXd& x) { return stacked_projections(x, camera, points); }, p);
}

// sigma^2 (J^T J)^-1 with the conditioning check shared by both covariance routes.
PoseCovariance covariance_from_jacobian(const Eigen::MatrixXd& jac, double sigma,
                                        double max_condition) {
  const Matrix6d info = jac.transpose() * jac;
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(info);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > max_condition) {
    throw SingularGeometry("feature geometry does not constrain the pose (condition " +
                           std::to_string(lo > 0.0 ? hi / lo : INFINITY) + ")");
  }
  PoseCovariance cov;
  const Matrix6d inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();
  cov.matrix = sigma * sigma * 0.5 * (inv + inv.transpose());
  return cov;
}

}  // namespace

FeatureMap::FeatureMap(std::vector<Feature> features) {
  for (const auto& f : features) add(f);
}

void FeatureMap::add(const Feature& feature) {
  if (find(feature.id)) {
    throw ConfigError("duplicate feature id " + std::to_string(feature.id));
  }
  features_.push_back(feature);
}

std::optional<std::size_t> FeatureMap::find(int id) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].id == id) return i;
  }
  return std::nullopt;
}

bool ConfigurationBounds::contains(const Pose& pose) const {
  for (int k = 0; k < 3; ++k) {
    if (pose.position[k] < min[k] || pose.position[k] > max[k]) return false;
  }
  const double yaw = wrap_two_pi(pose.yaw);
  return yaw >= yaw_min && yaw <= yaw_max;
}

void FeasibilityConfig::validate() const {
  if (!(tau > 0.0)) throw ConfigError("feasibility tau must be positive");
  if (min_features < 3) throw ConfigError("feasibility min_features must be at least 3");
  if ((trace_weights.array() < 0.0).any()) {
    throw ConfigError("quality-of-fix trace weights must be non-negative");
  }
}

std::vector<std::size_t> visible_features(const Pose& pose, const FeatureMap& map,
                                          const CameraModel& camera,
                                          const OcclusionTest& occluded) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto& f = map.features()[i];
    const auto proj = project(camera, world_to_camera(pose, camera, f.position));
    if (!proj || !proj->in_bounds) continue;
    if (occluded && occluded(camera_to_world(pose, camera, Eigen::Vector3d::Zero()), f.position)) {
      continue;
    }
    out.push_back(i);
  }
  return out;
}

DetectionSet simulate_detections(const Pose& pose, const FeatureMap& map,
                                 const CameraModel& camera, std::uint64_t noise_seed,
                                 const OcclusionTest& occluded) {
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  DetectionSet out;
  for (std::size_t i : visible_features(pose, map, camera, occluded)) {
    const auto& f = map.features()[i];
    Eigen::Vector2d px = pinhole(camera, world_to_camera(pose, camera, f.position));
    // Always draw both samples so the stream does not depend on sigma.
    const double du = noise(rng);
    const double dv = noise(rng);
    px += camera.pixel_sigma * Eigen::Vector2d(du, dv);
    if (px.x() < 0.0 || px.x() > camera.width || px.y() < 0.0 || px.y() > camera.height) {
      continue;
    }
    out.push_back({f.id, px});
  }
  return out;
}

PoseEstimate estimate_pose(const DetectionSet& detections, const FeatureMap& map,
                           const CameraModel& camera, const Pose& initial_guess,
                           int min_detections, const LmOptions& options) {
  if (static_cast<int>(detections.size()) < min_detections) {
    throw InsufficientDetections("need " + std::to_string(min_detections) +
                                 " detections, have " + std::to_string(detections.size()));
  }
  if (std::abs(std::abs(wrap_pi(initial_guess.pitch)) - std::numbers::pi / 2) < kGimbalMargin) {
    throw SingularGeometry("initial guess is at gimbal lock");
  }

  std::vector<Eigen::Vector3d> points;
  Eigen::VectorXd observed(2 * detections.size());
  points.reserve(detections.size());
  for (std::size_t k = 0; k < detections.size(); ++k) {
    const auto idx = map.find(detections[k].id);
    if (!idx) {
      throw ConfigError("detection references unknown feature " +
                        std::to_string(detections[k].id));
    }
    points.push_back(map.features()[*idx].position);
    observed.segment<2>(2 * k) = detections[k].pixel;
  }

  auto residual = [&](const Vector6d& p) -> Eigen::VectorXd {
    return stacked_projections(p, camera, points) - observed;
  };
  auto cost_of = [](const Eigen::VectorXd& r) {
    return r.allFinite() ? r.squaredNorm() : std::numeric_limits<double>::infinity();
  };

  Vector6d p = initial_guess.as_vector();
  Eigen::VectorXd r = residual(p);
  double cost = cost_of(r);
  if (!std::isfinite(cost)) {
    throw NoConvergence("initial guess places detected features behind the camera");
  }

  PoseEstimate est;
  est.initial_cost = cost;
  double lambda = options.initial_lambda;
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations && !converged; ++iter) {
    if (cost == 0.0) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd jac = projection_jacobian(p, camera, points);
    const Matrix6d h = jac.transpose() * jac;
    const Vector6d g = jac.transpose() * r;

    bool accepted = false;
    while (!accepted) {
      Matrix6d damped = h;
      damped.diagonal() += lambda * h.diagonal().cwiseMax(1e-12);
      const Vector6d delta = damped.ldlt().solve(-g);
      const Vector6d candidate = p + delta;
      const Eigen::VectorXd r_new = residual(candidate);
      const double cost_new = cost_of(r_new);
      if (cost_new < cost) {
        const double decrease = (cost - cost_new) / cost;
        p = candidate;
        r = r_new;
        cost = cost_new;
        lambda = std::max(lambda * 0.1, 1e-15);
        accepted = true;
        if (delta.norm() < options.step_tolerance ||
            decrease < options.relative_cost_tolerance) {
          converged = true;
        }
      } else {
        lambda *= 10.0;
        // No descent direction left: we are at a local minimum.
        if (lambda > 1e16 || delta.norm() < options.step_tolerance) {
          converged = true;
          break;
        }
      }
    }
  }
  if (!converged) {
    throw NoConvergence("pose estimate did not converge in " +
                        std::to_string(options.max_iterations) + " iterations");
  }

  est.iterations = iter;
  est.final_cost = cost;
  est.covariance = covariance_from_jacobian(projection_jacobian(p, camera, points),
                                            camera.pixel_sigma, options.max_condition);
  est.pose = Pose::from_vector(p).normalized();
  return est;
}

double quality_of_fix(const PoseCovariance& cov) {
  return quality_of_fix(cov, Vector6d::Ones());
}

double quality_of_fix(const PoseCovariance& cov, const Vector6d& trace_weights) {
  const double tr = trace_weights.dot(cov.matrix.diagonal());
  if (!(tr > 0.0)) throw InvalidCovariance("quality of fix needs a covariance with positive trace");
  return 1.0 / std::sqrt(tr);
}

PoseCovariance predicted_covariance(const Pose& pose, const FeatureMap& map,
                                    const CameraModel& camera, int min_features,
                                    double max_condition) {
  const auto visible = visible_features(pose, map, camera);
  if (static_cast<int>(visible.size()) < min_features) {
    throw InsufficientDetections("only " + std::to_string(visible.size()) +
                                 " features visible, need " + std::to_string(min_features));
  }
  std::vector<Eigen::Vector3d> points;
  points.reserve(visible.size());
  for (std::size_t i : visible) points.push_back(map.features()[i].position);
  return covariance_from_jacobian(projection_jacobian(pose.as_vector(), camera, points),
                                  camera.pixel_sigma, max_condition);
}

bool in_cfree(const Pose& pose, const FeatureMap& map, const CameraModel& camera,
              const FeasibilityConfig& cfg) {
  if (!cfg.bounds.contains(pose)) return false;
  try {
    const PoseCovariance cov = predicted_covariance(pose, map, camera, cfg.min_features);
    const double tr = cfg.trace_weights.dot(cov.matrix.diagonal());
    // A zero trace only happens with noise-free pixels: a perfect fix.
    if (tr == 0.0) return true;
    return quality_of_fix(cov, cfg.trace_weights) > cfg.tau;
  } catch (const InsufficientDetections&) {
    return false;
  } catch (const SingularGeometry&) {
    return false;
  }
}

QualityField quality_map(const FeatureMap& map, const CameraModel& camera, double z, double yaw,
                         const LatticeSpec& lattice, int min_features, unsigned threads) {
  if (lattice.nx <= 0 || lattice.ny <= 0) throw ConfigError("quality map lattice is empty");
  QualityField field;
  field.lattice = lattice;
  const std::size_t n = static_cast<std::size_t>(lattice.nx) * lattice.ny;
  field.values.resize(n);
  parallel_for(n, threads, [&](std::size_t k) {
    const int i = static_cast<int>(k % lattice.nx);
    const int j = static_cast<int>(k / lattice.nx);
    Pose pose;
    pose.position = {lattice.x(i), lattice.y(j), z};
    pose.yaw = yaw;
    try {
      const PoseCovariance cov = predicted_covariance(pose, map, camera, min_features);
      const double tr = cov.trace();
      field.values[k] = tr > 0.0 ? 1.0 / std::sqrt(tr) : std::numeric_limits<double>::infinity();
    } catch (const InsufficientDetections&) {
    } catch (const SingularGeometry&) {
    }
  });
  return field;
}

}  // namespace pilevol
