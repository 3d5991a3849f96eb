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

#ifndef PILEVOL_CAMPAIGN_HPP
#define PILEVOL_CAMPAIGN_HPP

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pilevol/config.hpp"
#include "pilevol/io.hpp"

namespace pilevol {

/// Everything a campaign derives from its config before flying.
struct Scene {
  Terrain terrain;
  FeatureMap features;
  OcclusionTest occlusion;   ///< empty unless features.occlusion is set
  PlanningContext context;   ///< kernel with lengthscale and slope_sigma resolved
  double true_volume = 0.0;  ///< [m^3]
};

Terrain build_terrain(const TerrainSpec& spec, const Domain& domain);
FeatureMap build_features(const FeatureSpec& spec);
Scene build_scene(const CampaignConfig& cfg);
HeightGrid prior_grid(const CampaignConfig& cfg);

struct StepRecord {
  int step = 0;                  ///< 1-based waypoint index
  Waypoint waypoint;
  double predicted_sigma = 0.0;  ///< NaN when the waypoint was not predictable
  double mu = 0.0;               ///< mu^V after this step [m^3]
  double sigma = 0.0;            ///< sigma^V after this step [m^3]
  double q_pos = 0.0;            ///< 0 when the pose has no usable fix
  int detections = 0;
  int measurements = 0;
  bool localized = false;
};

struct CampaignReport {
  CampaignConfig config;
  double lengthscale = 0.0;  ///< resolved l
  double slope_sigma = 0.0;  ///< resolved sigma_t
  double true_volume = 0.0;
  VolumeEstimate prior;
  std::vector<StepRecord> steps;
  std::vector<std::pair<int, HeightGrid>> snapshots;
  HeightGrid final_grid;
  std::vector<LoggedMeasurement> measurements;
  std::string stop_reason;

  VolumeEstimate final_estimate() const;
  double relative_error() const;
};

using ProgressFn = std::function<void(const StepRecord&)>;

/**
 * @brief Flies one campaign: localize, sweep, fuse and record at every waypoint.
 *
 * Greedy mode chooses each next waypoint with plan_next; square-wave mode flies
 * the first `horizon` lawnmower waypoints.  Throws LocalizationLost after
 * max_localization_failures consecutive failed fixes, NoFeasibleCandidate
 * when the greedy planner is boxed in.
 */
CampaignReport run_campaign(const CampaignConfig& cfg, unsigned threads = 1,
                            const ProgressFn& progress = {});

/// manifest.json, timeseries.csv, trajectory.csv, grid snapshots, optional measurements.csv.
void write_report(const CampaignReport& report, const std::filesystem::path& dir);

/// $PILEVOL_OUTPUT_DIR, or "pilevol_out".
std::filesystem::path default_output_dir();

}  // namespace pilevol

#endif  // PILEVOL_CAMPAIGN_HPP
