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

#include "pilevol/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pilevol/parallel.hpp"

namespace pilevol {

Pose Waypoint::pose() const {
  Pose p;
  p.position = {x, y, z};
  p.yaw = yaw;
  return p.normalized();
}

void PlannerConfig::validate() const {
  if (!(step_radius > 0.0)) throw ConfigError("planner step radius must be positive");
  if (candidates < 4) throw ConfigError("planner needs at least 4 candidates");
  if (horizon < 0) throw ConfigError("planner horizon must be non-negative");
}

std::vector<SurfaceMeasurement> nominal_sweep(const Pose& pose, const PoseCovariance& cov,
                                              const LidarModel& lidar, double nominal_height,
                                              double slope_sigma) {
  const Eigen::Vector3d origin = sensor_origin_world(pose, lidar);
  std::vector<SurfaceMeasurement> out;
  for (double alpha : lidar.sweep_angles()) {
    const Eigen::Vector3d dir = beam_direction_world(pose, lidar, alpha);
    if (!(dir.z() < 0.0)) continue;
    const double d_l = (nominal_height - origin.z()) / dir.z();
    if (d_l < lidar.d_min || d_l > lidar.d_max) continue;
    SurfaceMeasurement m;
    m.alpha = alpha;
    m.range = d_l;
    m.point = hit_point(pose, lidar, alpha, d_l);
    m.covariance = measurement_covariance(pose, cov, lidar, alpha, d_l);
    m.height_variance = condense_to_height(m.covariance, slope_sigma);
    out.push_back(m);
  }
  return out;
}

double predict_step_uncertainty(const HeightGrid& grid, const Waypoint& candidate,
                                const PlanningContext& ctx) {
  const Pose pose = candidate.pose();
  if (!in_cfree(pose, ctx.features, ctx.camera, ctx.feasibility)) {
    throw InfeasibleCandidate("candidate (" + std::to_string(candidate.x) + ", " +
                              std::to_string(candidate.y) + ") is outside C_free");
  }
  const PoseCovariance cov =
      predicted_covariance(pose, ctx.features, ctx.camera, ctx.feasibility.min_features);
  const auto sweep = nominal_sweep(pose, cov, ctx.lidar, ctx.planner.nominal_height,
                                   ctx.kernel.slope_sigma);
  HeightGrid scratch = grid;
  for (int rev = 0; rev < ctx.revolutions; ++rev) {
    for (const auto& m : sweep) fuse_measurement(scratch, ctx.kernel, m);
  }
  return volume(scratch, ctx.kernel).sigma;
}

std::vector<Waypoint> candidate_set(const Waypoint& current, const PlannerConfig& cfg) {
  std::vector<Waypoint> out;
  // Pulled in by a hair so rounding can never push a ring point outside the ball.
  const double r = cfg.step_radius * (1.0 - 1e-12);
  for (int k = 0; k < cfg.candidates; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / cfg.candidates;
    out.push_back({current.x + r * std::cos(theta), current.y + r * std::sin(theta), cfg.z,
                   cfg.yaw});
  }
  if (cfg.include_stay) out.push_back({current.x, current.y, cfg.z, cfg.yaw});
  return out;
}

PlanStep plan_next(const HeightGrid& grid, const Waypoint& current, const PlanningContext& ctx,
                   unsigned threads) {
  const auto candidates = candidate_set(current, ctx.planner);
  std::vector<double> scores(candidates.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(candidates.size(), threads, [&](std::size_t k) {
    const Waypoint& c = candidates[k];
    if ((c.position() - current.position()).norm() > ctx.planner.step_radius) return;
    if (!in_cfree(c.pose(), ctx.features, ctx.camera, ctx.feasibility)) return;
    scores[k] = predict_step_uncertainty(grid, c, ctx);
  });

  PlanStep step;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (std::isnan(scores[k])) continue;
    if (step.candidate_index < 0 || scores[k] < step.predicted_sigma) {
      step.candidate_index = static_cast<int>(k);
      step.predicted_sigma = scores[k];
    }
  }
  if (step.candidate_index < 0) {
    throw NoFeasibleCandidate("no feasible candidate within R = " +
                              std::to_string(ctx.planner.step_radius) + " of (" +
                              std::to_string(current.x) + ", " + std::to_string(current.y) + ")");
  }
  step.waypoint = candidates[static_cast<std::size_t>(step.candidate_index)];
  step.scores = std::move(scores);
  return step;
}

std::vector<Waypoint> square_wave_trajectory(const Domain& domain, double pitch, double z,
                                             double yaw, double step,
                                             const ConfigurationBounds& bounds) {
  if (!(pitch > 0.0) || !(step > 0.0)) throw ConfigError("square wave pitch and step must be positive");
  const int lanes = std::max(1, static_cast<int>(std::lround(domain.depth() / pitch)));

  std::vector<Eigen::Vector2d> corners;
  for (int k = 0; k < lanes; ++k) {
    const double y = lanes == 1 ? 0.5 * (domain.y_min + domain.y_max)
                                : domain.y_min + 0.5 * pitch + k * pitch;
    const bool forward = k % 2 == 0;
    corners.emplace_back(forward ? domain.x_min : domain.x_max, y);
    corners.emplace_back(forward ? domain.x_max : domain.x_min, y);
  }

  std::vector<Waypoint> out;
  auto emit = [&](const Eigen::Vector2d& p) {
    out.push_back({std::clamp(p.x(), bounds.min.x(), bounds.max.x()),
                   std::clamp(p.y(), bounds.min.y(), bounds.max.y()),
                   std::clamp(z, bounds.min.z(), bounds.max.z()), yaw});
  };
  emit(corners.front());
  for (std::size_t s = 0; s + 1 < corners.size(); ++s) {
    const Eigen::Vector2d a = corners[s];
    const Eigen::Vector2d b = corners[s + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / step - 1e-9)));
    for (int k = 1; k <= pieces; ++k) emit(a + (b - a) * (static_cast<double>(k) / pieces));
  }
  return out;
}

}  // namespace pilevol
