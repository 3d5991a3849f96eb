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

#ifndef PILEVOL_PLANNER_HPP
#define PILEVOL_PLANNER_HPP

#include <vector>

#include "pilevol/lidar.hpp"
#include "pilevol/localization.hpp"
#include "pilevol/surface_model.hpp"

namespace pilevol {

/// Position and yaw reference handed to the flight controller.
struct Waypoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;

  Pose pose() const;
  Eigen::Vector3d position() const { return {x, y, z}; }
};

struct PlannerConfig {
  double step_radius = 2.0;     ///< R [m]
  int candidates = 16;          ///< points on the ring of radius R
  bool include_stay = true;     ///< also consider hovering in place
  double z = 7.0;               ///< fixed altitude [m]
  double yaw = 0.0;             ///< fixed yaw [rad]
  int horizon = 50;             ///< waypoint budget
  double nominal_height = 2.0;  ///< h0 [m], flat surface assumed for prediction
  double target_ratio = 0.0;    ///< stop early when sigma^V / mu^V drops below (0 = never)

  void validate() const;
};

/// Everything a planning step needs besides the grid.
struct PlanningContext {
  KernelConfig kernel;
  LidarModel lidar;
  int revolutions = 1;
  FeatureMap features;
  CameraModel camera;
  FeasibilityConfig feasibility;
  PlannerConfig planner;
};

/// Hypothetical measurements from one waypoint against the flat surface at h0 (no shadows).
std::vector<SurfaceMeasurement> nominal_sweep(const Pose& pose, const PoseCovariance& cov,
                                              const LidarModel& lidar, double nominal_height,
                                              double slope_sigma);

/**
 * sigma^V after hypothetically measuring from `candidate`.  The grid is not
 * modified.  Throws InfeasibleCandidate when the candidate is outside C_free.
 */
double predict_step_uncertainty(const HeightGrid& grid, const Waypoint& candidate,
                                const PlanningContext& ctx);

/// Ring of candidates around `current` (angle order), followed by `current` itself.
std::vector<Waypoint> candidate_set(const Waypoint& current, const PlannerConfig& cfg);

struct PlanStep {
  Waypoint waypoint;
  double predicted_sigma = 0.0;
  int candidate_index = -1;
  /// Score of every candidate; NaN for those rejected as infeasible.
  std::vector<double> scores;
};

/**
 * Greedy next waypoint: the feasible candidate with the smallest predicted
 * sigma^V, ties going to the lowest index.  Throws NoFeasibleCandidate.
 */
PlanStep plan_next(const HeightGrid& grid, const Waypoint& current, const PlanningContext& ctx,
                   unsigned threads = 1);

/**
 * Boustrophedon pattern over the domain: lanes parallel to x spaced `pitch`
 * apart, each segment split into equal pieces no longer than `step`.
 * Waypoints are clamped to `bounds`.
 */
std::vector<Waypoint> square_wave_trajectory(const Domain& domain, double pitch, double z,
                                             double yaw, double step,
                                             const ConfigurationBounds& bounds = {});

}  // namespace pilevol

#endif  // PILEVOL_PLANNER_HPP
