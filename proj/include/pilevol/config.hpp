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

#ifndef PILEVOL_CONFIG_HPP
#define PILEVOL_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "pilevol/lidar.hpp"
#include "pilevol/localization.hpp"
#include "pilevol/planner.hpp"
#include "pilevol/surface_model.hpp"
#include "pilevol/terrain.hpp"

namespace pilevol {

/// Rigid mount given as translation [m] and roll/pitch/yaw [deg].
struct MountSpec {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double yaw_deg = 0.0;

  RigidTransform transform() const;
};

struct TerrainSpec {
  std::string source = "alps";  ///< alps | flat | ramp | bumps | fractal | file
  std::string path;             ///< ASCII grid, when source = file
  double cellsize = 0.125;      ///< [m]
  double margin = 4.0;          ///< lattice extends this far beyond the domain [m]
  double height = 2.0;          ///< flat height / ramp base [m]
  double slope_x = 0.2;
  double slope_y = 0.0;
  double relief = 4.0;          ///< alps/bumps/fractal peak-to-floor scale [m]
  std::uint64_t seed = 11;
};

struct FeatureSpec {
  std::string source = "wall";  ///< wall | file
  std::string path;
  double wall_x = 25.0;
  double y_min = 1.0;
  double y_max = 19.0;
  int cols = 8;
  double z_min = 0.0;
  double z_max = 14.0;
  int rows = 4;
  bool occlusion = false;       ///< terrain occludes features
};

struct GridSpec {
  int nx = 16;
  int ny = 16;
  double prior_variance = 4.0;  ///< [m^2]
};

struct SquareWaveSpec {
  double pitch = 5.0;  ///< lane spacing [m]
  double step = 2.0;   ///< maximum waypoint spacing [m]
};

enum class CampaignMode { kGreedy, kSquareWave };

std::string to_string(CampaignMode mode);
CampaignMode parse_mode(const std::string& text);

/**
 * @brief Complete description of a simulated campaign.
 *
 * lengthscale = 0 resolves to one fifth of the domain width and
 * slope_sigma < 0 resolves to the slope statistic of the terrain.
 */
struct CampaignConfig {
  Domain domain{0.0, 20.0, 0.0, 20.0};
  TerrainSpec terrain;
  FeatureSpec features;
  CameraModel camera;
  MountSpec camera_mount{0.0, 0.0, 0.0, -90.0, 0.0, -90.0};
  LidarModel lidar;
  MountSpec lidar_mount;
  int revolutions = 1;
  KernelConfig kernel{0.0, 1.5, 4.0, -1.0};
  GridSpec grid;
  FeasibilityConfig feasibility;
  PlannerConfig planner;
  SquareWaveSpec square_wave;
  double start_x = 0.0;
  double start_y = 2.5;
  std::uint64_t seed = 1;
  CampaignMode mode = CampaignMode::kGreedy;
  int max_localization_failures = 3;
  std::vector<int> checkpoints{20, 50};
  bool log_measurements = false;

  CampaignConfig();
  /// Checks every sub-config. Throws ConfigError.
  void validate() const;
};

/// One config entry, value formatted so that parsing it back is exact.
struct Setting {
  std::string section;
  std::string key;
  std::string value;
};

/// Every effective setting, in a fixed order.
std::vector<Setting> settings(const CampaignConfig& cfg);
/// Throws ConfigError for unknown keys or unparsable values.
void apply_setting(CampaignConfig& cfg, const std::string& section, const std::string& key,
                   const std::string& value);

/**
 * Reads a sectioned key-value file (INI) or a run manifest (JSON, its "config"
 * object).  Keys not present keep their defaults.
 */
CampaignConfig load_config(const std::filesystem::path& path);
void write_config(const CampaignConfig& cfg, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace pilevol

#endif  // PILEVOL_CONFIG_HPP
