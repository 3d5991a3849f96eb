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

#include "pilevol/validate.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pilevol/campaign.hpp"

namespace pilevol {

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    if (line.back() == ',') row.emplace_back();
    rows.push_back(std::move(row));
  }
  return rows;
}

double number(const std::string& text) {
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + text + "' in run files");
  }
}

std::string where(const std::string& what, std::size_t row) {
  return what + " row " + std::to_string(row + 1);
}

}  // namespace

ValidationResult validate_run(const std::filesystem::path& dir) {
  const CampaignConfig cfg = load_config(dir / "manifest.json");
  const FeatureMap features = build_features(cfg.features);
  ValidationResult result;

  const auto traj = read_csv(dir / "trajectory.csv");
  for (std::size_t r = 0; r < traj.size(); ++r) {
    if (traj[r].size() < 5) throw ConfigError(where("trajectory.csv", r) + " is short");
    const Waypoint wp{number(traj[r][1]), number(traj[r][2]), number(traj[r][3]),
                      number(traj[r][4])};
    const Pose pose = wp.pose();
    double q = 0.0;
    try {
      q = quality_of_fix(predicted_covariance(pose, features, cfg.camera,
                                              cfg.feasibility.min_features),
                         cfg.feasibility.trace_weights);
    } catch (const Error&) {
    }
    result.expect(in_cfree(pose, features, cfg.camera, cfg.feasibility),
                  where("trajectory.csv", r) + ": waypoint outside C_free (q_pos = " +
                      format_double(q) + ", tau = " + format_double(cfg.feasibility.tau) + ")");
    if (r > 0) {
      const Waypoint prev{number(traj[r - 1][1]), number(traj[r - 1][2]), number(traj[r - 1][3]),
                          number(traj[r - 1][4])};
      const double hop = (wp.position() - prev.position()).norm();
      result.expect(hop <= cfg.planner.step_radius,
                    where("trajectory.csv", r) + ": step of " + format_double(hop) +
                        " m exceeds R = " + format_double(cfg.planner.step_radius));
    }
  }

  const auto series = read_csv(dir / "timeseries.csv");
  for (std::size_t r = 0; r < series.size(); ++r) {
    if (series[r].size() < 3) throw ConfigError(where("timeseries.csv", r) + " is short");
    const double mu = number(series[r][1]);
    const double sigma = number(series[r][2]);
    result.expect(std::isfinite(mu), where("timeseries.csv", r) + ": mu_V is not finite");
    if (r > 0) {
      const double before = number(series[r - 1][2]);
      // Relative slack of 1e-9 absorbs summation-order noise only.
      result.expect(sigma <= before * (1.0 + 1e-9),
                    where("timeseries.csv", r) + ": sigma_V increased from " +
                        format_double(before) + " to " + format_double(sigma));
    }
  }
  result.expect(series.size() == traj.size() + 1,
                "timeseries.csv should have one row per waypoint plus the prior");
  return result;
}

ValidationResult validate_config(const CampaignConfig& cfg) {
  ValidationResult result;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    result.expect(false, e.what());
    return result;
  }
  const Scene scene = build_scene(cfg);
  result.expect(scene.terrain.covers(cfg.domain), "terrain does not cover the domain");
  result.expect(std::isfinite(scene.true_volume), "true volume is not finite");
  result.expect(scene.features.size() >= static_cast<std::size_t>(cfg.feasibility.min_features),
                "fewer features in the map than min_features");
  if (cfg.mode == CampaignMode::kGreedy) {
    const Waypoint start{cfg.start_x, cfg.start_y, cfg.planner.z, cfg.planner.yaw};
    result.expect(in_cfree(start.pose(), scene.features, cfg.camera, cfg.feasibility),
                  "start waypoint is outside C_free");
  } else {
    result.expect(cfg.square_wave.step <= cfg.planner.step_radius,
                  "square wave step exceeds the step radius R");
    const auto pattern = square_wave_trajectory(cfg.domain, cfg.square_wave.pitch, cfg.planner.z,
                                                cfg.planner.yaw, cfg.square_wave.step,
                                                cfg.feasibility.bounds);
    for (std::size_t k = 0; k < pattern.size(); ++k) {
      result.expect(in_cfree(pattern[k].pose(), scene.features, cfg.camera, cfg.feasibility),
                    "square wave waypoint " + std::to_string(k + 1) + " is outside C_free");
    }
  }
  const HeightGrid prior = prior_grid(cfg);
  const VolumeEstimate v = volume(prior, scene.context.kernel);
  result.expect(std::isfinite(v.mean) && std::isfinite(v.sigma) && v.sigma > 0.0,
                "prior volume estimate is degenerate");
  return result;
}

}  // namespace pilevol
