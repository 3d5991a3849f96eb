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

#include "pilevol/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include <json.hpp>

#include "pilevol/random.hpp"

namespace pilevol {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Substream tags.
enum : std::uint64_t { kDetectTag = 1, kSweepTag = 2 };

std::string field(double v) { return std::isnan(v) ? std::string() : format_double(v); }

std::vector<Bump> random_bumps(const Domain& d, std::uint64_t seed, double relief) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Bump> bumps;
  for (int k = 0; k < 4; ++k) {
    Bump b;
    b.x = d.x_min + d.width() * (0.15 + 0.7 * unit(rng));
    b.y = d.y_min + d.depth() * (0.15 + 0.7 * unit(rng));
    b.height = relief * (0.5 + 0.5 * unit(rng));
    b.sigma_x = d.width() * (0.08 + 0.12 * unit(rng));
    b.sigma_y = d.depth() * (0.08 + 0.12 * unit(rng));
    b.angle = std::numbers::pi * unit(rng);
    bumps.push_back(b);
  }
  return bumps;
}

}  // namespace

Terrain build_terrain(const TerrainSpec& spec, const Domain& domain) {
  if (spec.source == "file") {
    Terrain t = read_ascii_grid(spec.path);
    if (!t.covers(domain)) throw DomainError("terrain " + spec.path + " does not cover the domain");
    return t;
  }
  const TerrainLattice lattice = TerrainLattice::covering(domain, spec.margin, spec.cellsize);
  if (spec.source == "alps") return alps_terrain(lattice, domain, spec.seed, spec.relief);
  if (spec.source == "flat") return flat_terrain(lattice, spec.height);
  if (spec.source == "ramp") return ramp_terrain(lattice, spec.height, spec.slope_x, spec.slope_y);
  if (spec.source == "bumps") {
    return bump_terrain(lattice, spec.height, random_bumps(domain, spec.seed, spec.relief));
  }
  if (spec.source == "fractal") {
    const Terrain noise = fractal_terrain(lattice, spec.seed, spec.relief);
    std::vector<double> h = noise.heights();
    for (double& v : h) v += spec.height;
    return Terrain(lattice, std::move(h));
  }
  throw ConfigError("unknown terrain source '" + spec.source +
                    "' (alps | flat | ramp | bumps | fractal | file)");
}

FeatureMap build_features(const FeatureSpec& spec) {
  if (spec.source == "file") return read_feature_map(spec.path);
  return feature_wall(spec.wall_x, spec.y_min, spec.y_max, spec.cols, spec.z_min, spec.z_max,
                      spec.rows);
}

Scene build_scene(const CampaignConfig& cfg) {
  cfg.validate();
  Scene scene{build_terrain(cfg.terrain, cfg.domain), build_features(cfg.features), {}, {}, 0.0};
  if (cfg.features.occlusion) scene.occlusion = terrain_occlusion(scene.terrain);

  PlanningContext& ctx = scene.context;
  ctx.kernel = cfg.kernel;
  if (ctx.kernel.lengthscale == 0.0) ctx.kernel.lengthscale = cfg.domain.width() / 5.0;
  if (ctx.kernel.slope_sigma < 0.0) ctx.kernel.slope_sigma = slope_sigma(scene.terrain);
  ctx.kernel.validate();
  ctx.lidar = cfg.lidar;
  ctx.revolutions = cfg.revolutions;
  ctx.features = scene.features;
  ctx.camera = cfg.camera;
  ctx.feasibility = cfg.feasibility;
  ctx.planner = cfg.planner;
  scene.true_volume = true_volume(scene.terrain, cfg.domain);
  return scene;
}

HeightGrid prior_grid(const CampaignConfig& cfg) {
  return HeightGrid(cfg.domain, cfg.grid.nx, cfg.grid.ny, cfg.planner.nominal_height,
                    cfg.grid.prior_variance);
}

VolumeEstimate CampaignReport::final_estimate() const {
  if (steps.empty()) return prior;
  return {steps.back().mu, steps.back().sigma};
}

double CampaignReport::relative_error() const {
  return std::abs(final_estimate().mean - true_volume) / std::abs(true_volume);
}

CampaignReport run_campaign(const CampaignConfig& cfg, unsigned threads, const ProgressFn& progress) {
  const Scene scene = build_scene(cfg);
  const PlanningContext& ctx = scene.context;

  CampaignReport report;
  report.config = cfg;
  report.lengthscale = ctx.kernel.lengthscale;
  report.slope_sigma = ctx.kernel.slope_sigma;
  report.true_volume = scene.true_volume;

  HeightGrid grid = prior_grid(cfg);
  report.prior = volume(grid, ctx.kernel);
  const RangeOracle oracle = terrain_oracle(scene.terrain);

  std::vector<Waypoint> pattern;
  if (cfg.mode == CampaignMode::kSquareWave) {
    pattern = square_wave_trajectory(cfg.domain, cfg.square_wave.pitch, cfg.planner.z,
                                     cfg.planner.yaw, cfg.square_wave.step,
                                     cfg.feasibility.bounds);
  }
  const int horizon = cfg.mode == CampaignMode::kSquareWave
                          ? std::min<int>(cfg.planner.horizon, static_cast<int>(pattern.size()))
                          : cfg.planner.horizon;

  Waypoint next{cfg.start_x, cfg.start_y, cfg.planner.z, cfg.planner.yaw};
  double next_prediction = kNaN;
  std::optional<Pose> last_estimate;
  int consecutive_failures = 0;
  report.stop_reason = "horizon";

  for (int step = 1; step <= horizon; ++step) {
    StepRecord rec;
    rec.step = step;
    if (cfg.mode == CampaignMode::kSquareWave) {
      rec.waypoint = pattern[static_cast<std::size_t>(step - 1)];
      try {
        rec.predicted_sigma = predict_step_uncertainty(grid, rec.waypoint, ctx);
      } catch (const InfeasibleCandidate&) {
        rec.predicted_sigma = kNaN;
      }
    } else {
      rec.waypoint = next;
      rec.predicted_sigma = next_prediction;
      if (step == 1) {
        try {
          rec.predicted_sigma = predict_step_uncertainty(grid, rec.waypoint, ctx);
        } catch (const InfeasibleCandidate&) {
          rec.predicted_sigma = kNaN;
        }
      }
    }

    // The vehicle tracks its commanded waypoint; only its belief about the pose is uncertain.
    const Pose truth = rec.waypoint.pose();
    try {
      rec.q_pos = quality_of_fix(predicted_covariance(truth, scene.features, cfg.camera,
                                                      cfg.feasibility.min_features),
                                 cfg.feasibility.trace_weights);
    } catch (const Error&) {
      rec.q_pos = 0.0;
    }

    const DetectionSet detections =
        simulate_detections(truth, scene.features, cfg.camera,
                            substream_seed(cfg.seed, {static_cast<std::uint64_t>(step), kDetectTag}),
                            scene.occlusion);
    rec.detections = static_cast<int>(detections.size());
    std::optional<PoseEstimate> fix;
    try {
      fix = estimate_pose(detections, scene.features, cfg.camera, last_estimate.value_or(truth),
                          cfg.feasibility.min_features);
    } catch (const InsufficientDetections&) {
    } catch (const SingularGeometry&) {
    } catch (const NoConvergence&) {
    }

    if (fix) {
      consecutive_failures = 0;
      rec.localized = true;
      last_estimate = fix->pose;
      for (int rev = 0; rev < cfg.revolutions; ++rev) {
        const auto sweep = scan_sweep(
            truth, fix->pose, fix->covariance, cfg.lidar, oracle, ctx.kernel.slope_sigma,
            substream_seed(cfg.seed, {static_cast<std::uint64_t>(step), kSweepTag,
                                      static_cast<std::uint64_t>(rev)}));
        for (const auto& m : sweep) {
          fuse_measurement(grid, ctx.kernel, m);
          ++rec.measurements;
          if (cfg.log_measurements) report.measurements.push_back({step, m});
        }
      }
    } else if (++consecutive_failures >= cfg.max_localization_failures) {
      throw LocalizationLost("localization failed at " + std::to_string(consecutive_failures) +
                             " consecutive waypoints (last at step " + std::to_string(step) + ")");
    }

    const VolumeEstimate v = volume(grid, ctx.kernel);
    rec.mu = v.mean;
    rec.sigma = v.sigma;
    report.steps.push_back(rec);
    if (progress) progress(rec);

    if (std::find(cfg.checkpoints.begin(), cfg.checkpoints.end(), step) != cfg.checkpoints.end()) {
      report.snapshots.emplace_back(step, grid);
    }
    if (cfg.planner.target_ratio > 0.0 && v.sigma < cfg.planner.target_ratio * std::abs(v.mean)) {
      report.stop_reason = "target_ratio";
      break;
    }
    if (cfg.mode == CampaignMode::kGreedy && step < horizon) {
      const PlanStep plan = plan_next(grid, rec.waypoint, ctx, threads);
      next = plan.waypoint;
      next_prediction = plan.predicted_sigma;
    }
  }
  report.final_grid = std::move(grid);
  return report;
}

void write_report(const CampaignReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    return out;
  };

  {
    auto out = open("timeseries.csv");
    out << "step,mu_V,sigma_V,q_pos\n";
    out << "0," << format_double(report.prior.mean) << "," << format_double(report.prior.sigma)
        << ",\n";
    for (const auto& s : report.steps) {
      out << s.step << "," << format_double(s.mu) << "," << format_double(s.sigma) << ","
          << format_double(s.q_pos) << "\n";
    }
  }
  {
    auto out = open("trajectory.csv");
    out << "index,x,y,z,yaw,predicted_sigma_V,realized_sigma_V,realized_mu_V\n";
    for (const auto& s : report.steps) {
      out << s.step << "," << format_double(s.waypoint.x) << "," << format_double(s.waypoint.y)
          << "," << format_double(s.waypoint.z) << "," << format_double(s.waypoint.yaw) << ","
          << field(s.predicted_sigma) << "," << format_double(s.sigma) << ","
          << format_double(s.mu) << "\n";
    }
  }

  nlohmann::ordered_json files = nlohmann::ordered_json::array({"timeseries.csv", "trajectory.csv"});
  for (const auto& [step, grid] : report.snapshots) {
    char name[32];
    std::snprintf(name, sizeof(name), "grid_step_%03d.csv", step);
    write_grid_snapshot(grid, dir / name);
    files.push_back(name);
  }
  write_grid_snapshot(report.final_grid, dir / "grid_final.csv");
  files.push_back("grid_final.csv");
  if (report.config.log_measurements) {
    write_measurement_log(report.measurements, dir / "measurements.csv");
    files.push_back("measurements.csv");
  }

  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& s : settings(report.config)) config[s.section][s.key] = s.value;

  const VolumeEstimate fin = report.final_estimate();
  nlohmann::ordered_json manifest;
  manifest["tool"] = "pilevol";
  manifest["mode"] = to_string(report.config.mode);
  manifest["seed"] = report.config.seed;
  manifest["config"] = config;
  manifest["resolved"] = {{"lengthscale", report.lengthscale},
                          {"slope_sigma", report.slope_sigma}};
  manifest["results"] = {{"true_volume", report.true_volume},
                         {"prior_mu_V", report.prior.mean},
                         {"prior_sigma_V", report.prior.sigma},
                         {"final_mu_V", fin.mean},
                         {"final_sigma_V", fin.sigma},
                         {"relative_error", report.relative_error()},
                         {"sigma_ratio", fin.sigma / std::abs(fin.mean)},
                         {"steps", report.steps.size()},
                         {"stop_reason", report.stop_reason}};
  manifest["files"] = files;
  auto out = open("manifest.json");
  out << manifest.dump(2) << "\n";
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("PILEVOL_OUTPUT_DIR"); env && *env) return env;
  return "pilevol_out";
}

}  // namespace pilevol
