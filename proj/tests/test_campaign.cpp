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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pilevol/campaign.hpp"
#include "pilevol/config.hpp"
#include "pilevol/io.hpp"
#include "pilevol/validate.hpp"

namespace pilevol {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pilevol_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// 10 x 10 m pile, one square-wave lane through the middle.
CampaignConfig small_flat(double height) {
  CampaignConfig cfg;
  cfg.domain = {0, 10, 0, 10};
  cfg.terrain.source = "flat";
  cfg.terrain.height = height;
  cfg.grid.nx = 8;
  cfg.grid.ny = 8;
  cfg.mode = CampaignMode::kSquareWave;
  cfg.square_wave.pitch = 10;
  cfg.square_wave.step = 2;
  cfg.planner.horizon = 6;
  cfg.start_x = 0;
  cfg.start_y = 5;
  cfg.checkpoints = {3};
  return cfg;
}

void silence_noise(CampaignConfig& cfg) {
  apply_setting(cfg, "camera", "pixel_sigma", "0");
  apply_setting(cfg, "lidar", "angle_variance", "0");
  apply_setting(cfg, "lidar", "range_variance", "0");
}

void expect_non_increasing_sigma(const CampaignReport& r) {
  double prev = r.prior.sigma;
  for (const auto& s : r.steps) {
    EXPECT_LE(s.sigma, prev * (1 + 1e-9)) << "step " << s.step;
    prev = s.sigma;
  }
}

TEST(Campaign, ZeroHorizonIsJustThePrior) {
  CampaignConfig cfg = small_flat(2.0);
  cfg.planner.horizon = 0;
  const CampaignReport r = run_campaign(cfg);
  EXPECT_TRUE(r.steps.empty());
  EXPECT_EQ(r.final_estimate().mean, r.prior.mean);
  EXPECT_EQ(r.final_estimate().sigma, r.prior.sigma);
  EXPECT_NEAR(r.true_volume, 200.0, 1e-9);
}

TEST(Campaign, PriorVolumeUsesNominalHeight) {
  const CampaignConfig cfg = small_flat(2.0);
  const HeightGrid g = prior_grid(cfg);
  EXPECT_EQ(g.size(), 64u);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_EQ(g.mean(k), cfg.planner.nominal_height);
    EXPECT_EQ(g.variance(k), cfg.grid.prior_variance);
  }
}

TEST(Campaign, NoiseFreeFlatSlabIsRecovered) {
  CampaignConfig cfg = small_flat(3.0);
  silence_noise(cfg);
  const CampaignReport r = run_campaign(cfg);
  ASSERT_EQ(r.steps.size(), 6u);
  EXPECT_LT(r.relative_error(), 1e-3);
  for (const auto& s : r.steps) EXPECT_TRUE(s.localized);
  expect_non_increasing_sigma(r);
}

TEST(Campaign, NoisyFlatSlabIsClose) {
  const CampaignReport r = run_campaign(small_flat(3.0));
  // Each fix carries a few cm of altitude error into its whole sweep.
  EXPECT_LT(r.relative_error(), 0.03);
  EXPECT_LT(r.final_estimate().sigma, r.prior.sigma);
  expect_non_increasing_sigma(r);
}

TEST(Campaign, SquareWaveVisitsThePattern) {
  const CampaignConfig cfg = small_flat(2.0);
  const CampaignReport r = run_campaign(cfg);
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    EXPECT_NEAR(r.steps[k].waypoint.x, 2.0 * k, 1e-12);
    EXPECT_EQ(r.steps[k].waypoint.y, 5.0);
    EXPECT_GT(r.steps[k].q_pos, cfg.feasibility.tau);
  }
  ASSERT_EQ(r.snapshots.size(), 1u);
  EXPECT_EQ(r.snapshots[0].first, 3);
}

TEST(Campaign, GreedyIsDeterministicAndThreadIndependent) {
  CampaignConfig cfg = small_flat(2.0);
  cfg.terrain.source = "bumps";
  cfg.mode = CampaignMode::kGreedy;
  cfg.planner.horizon = 3;
  const CampaignReport a = run_campaign(cfg, 1);
  const CampaignReport b = run_campaign(cfg, 3);
  ASSERT_EQ(a.steps.size(), 3u);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t k = 0; k < a.steps.size(); ++k) {
    EXPECT_EQ(a.steps[k].waypoint.x, b.steps[k].waypoint.x);
    EXPECT_EQ(a.steps[k].waypoint.y, b.steps[k].waypoint.y);
    EXPECT_EQ(a.steps[k].mu, b.steps[k].mu);
    EXPECT_EQ(a.steps[k].sigma, b.steps[k].sigma);
  }
  for (std::size_t k = 1; k < a.steps.size(); ++k) {
    const double hop = (a.steps[k].waypoint.position() - a.steps[k - 1].waypoint.position()).norm();
    EXPECT_LE(hop, cfg.planner.step_radius);
    EXPECT_FALSE(std::isnan(a.steps[k].predicted_sigma));
  }
  expect_non_increasing_sigma(a);
  cfg.seed = 2;
  const CampaignReport c = run_campaign(cfg, 1);
  EXPECT_NE(c.steps.back().mu, a.steps.back().mu);
}

TEST(Campaign, LostWithoutFeatures) {
  CampaignConfig cfg = small_flat(2.0);
  cfg.features.wall_x = -40;  // behind the camera
  cfg.max_localization_failures = 2;
  EXPECT_THROW(run_campaign(cfg), LocalizationLost);
}

TEST(Campaign, ReportFilesAndValidation) {
  const fs::path dir = scratch("report");
  CampaignConfig cfg = small_flat(2.0);
  cfg.log_measurements = true;
  write_report(run_campaign(cfg), dir);
  for (const char* f : {"manifest.json", "timeseries.csv", "trajectory.csv", "grid_step_003.csv",
                        "grid_final.csv", "measurements.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const ValidationResult v = validate_run(dir);
  EXPECT_TRUE(v.ok());
  EXPECT_GT(v.checks, 6);
  // The manifest reloads into the same effective config.
  const CampaignConfig back = load_config(dir / "manifest.json");
  const auto a = settings(cfg), b = settings(back);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].value, b[k].value) << a[k].key;
}

TEST(Validate, CatchesAnOversizedHop) {
  const fs::path dir = scratch("tampered");
  write_report(run_campaign(small_flat(2.0)), dir);
  std::ifstream in(dir / "trajectory.csv");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  in.close();
  ASSERT_GE(lines.size(), 3u);
  // Push the second waypoint 3 m further along x.
  std::string& row = lines[2];
  const auto a = row.find(',');
  const auto b = row.find(',', a + 1);
  row = row.substr(0, a + 1) + format_double(std::stod(row.substr(a + 1, b - a - 1)) + 3.0) +
        row.substr(b);
  std::ofstream out(dir / "trajectory.csv");
  for (const auto& line : lines) out << line << "\n";
  out.close();
  EXPECT_FALSE(validate_run(dir).ok());
}

TEST(Validate, ConfigChecks) {
  EXPECT_TRUE(validate_config(small_flat(2.0)).ok());
  CampaignConfig cfg = small_flat(2.0);
  cfg.square_wave.step = 3.0;  // beyond R = 2
  EXPECT_FALSE(validate_config(cfg).ok());
  cfg = small_flat(2.0);
  cfg.grid.nx = 0;
  EXPECT_FALSE(validate_config(cfg).ok());
}

TEST(Config, DefaultsValidate) {
  const CampaignConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.feasibility.tau, 3.5);
  EXPECT_EQ(cfg.kernel.lengthscale, 0.0);  // auto
}

TEST(Config, SettingsRoundTripThroughApply) {
  CampaignConfig cfg;
  apply_setting(cfg, "kernel", "lengthscale", "2.5");
  apply_setting(cfg, "camera", "mount_yaw_deg", "-80");
  apply_setting(cfg, "campaign", "checkpoints", "5,10,15");
  apply_setting(cfg, "campaign", "mode", "square_wave");
  apply_setting(cfg, "lidar", "range_variance", "0.1");
  CampaignConfig copy;
  for (const auto& s : settings(cfg)) apply_setting(copy, s.section, s.key, s.value);
  const auto a = settings(cfg), b = settings(copy);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].value, b[k].value) << a[k].key;
  EXPECT_EQ(copy.checkpoints, (std::vector<int>{5, 10, 15}));
  EXPECT_EQ(copy.mode, CampaignMode::kSquareWave);
  EXPECT_TRUE(copy.camera.mount.rotation.isApprox(cfg.camera.mount.rotation));
}

TEST(Config, BadKeysAndValues) {
  CampaignConfig cfg;
  EXPECT_THROW(apply_setting(cfg, "kernel", "nope", "1"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "nope", "nu", "1"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "kernel", "nu", "abc"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "grid", "nx", "2.5"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "campaign", "mode", "spiral"), ConfigError);
}

TEST(Config, FileRoundTrip) {
  const fs::path dir = scratch("config");
  CampaignConfig cfg;
  apply_setting(cfg, "planner", "step_radius", "1.75");
  apply_setting(cfg, "terrain", "source", "fractal");
  apply_setting(cfg, "kernel", "jitter", "1e-10");
  write_config(cfg, dir / "c.cfg");
  const CampaignConfig back = load_config(dir / "c.cfg");
  const auto a = settings(cfg), b = settings(back);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].value, b[k].value) << a[k].key;
}

TEST(Config, PartialFileKeepsDefaults) {
  const fs::path dir = scratch("partial");
  std::ofstream(dir / "p.cfg") << "# comment\n[grid]\nnx = 10\n\n[planner]\nhorizon = 7\n";
  const CampaignConfig cfg = load_config(dir / "p.cfg");
  EXPECT_EQ(cfg.grid.nx, 10);
  EXPECT_EQ(cfg.grid.ny, 16);
  EXPECT_EQ(cfg.planner.horizon, 7);
  std::ofstream(dir / "bad.cfg") << "[grid]\nnz = 3\n";
  EXPECT_THROW(load_config(dir / "bad.cfg"), ConfigError);
}

TEST(FormatDouble, ShortestExact) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.125, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Io, FeatureMapRoundTrip) {
  const fs::path dir = scratch("features");
  const FeatureMap m = feature_wall(25, 1, 19, 3, 0, 14, 2, 7);
  write_feature_map(m, dir / "f.csv");
  const FeatureMap back = read_feature_map(dir / "f.csv");
  ASSERT_EQ(back.size(), m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    EXPECT_EQ(back.features()[k].id, m.features()[k].id);
    EXPECT_EQ(back.features()[k].position, m.features()[k].position);
  }
}

TEST(Io, AsciiGridRoundTripAndOrientation) {
  const fs::path dir = scratch("ascii");
  const Terrain t = ramp_terrain(TerrainLattice::covering({0, 4, 0, 2}, 0, 0.5), 1, 0.25, 0.5);
  write_ascii_grid(t, dir / "t.asc");
  const Terrain back = read_ascii_grid(dir / "t.asc");
  EXPECT_EQ(back.heights(), t.heights());
  EXPECT_EQ(back.lattice().nx, t.lattice().nx);
  EXPECT_DOUBLE_EQ(*back.height_at(4, 2), 1 + 1 + 1);

  // Corner-registered header, first row northernmost.
  std::ofstream(dir / "c.asc") << "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 2\n"
                                  "5 6\n1 2\n";
  const Terrain c = read_ascii_grid(dir / "c.asc");
  EXPECT_DOUBLE_EQ(*c.height_at(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(*c.height_at(3, 3), 6.0);

  std::ofstream(dir / "n.asc") << "ncols 2\nnrows 2\nxllcenter 0\nyllcenter 0\ncellsize 1\n"
                                  "NODATA_value -9999\n1 -9999\n1 1\n";
  EXPECT_THROW(read_ascii_grid(dir / "n.asc"), ConfigError);
}

TEST(Io, GridSnapshotRoundTrip) {
  const fs::path dir = scratch("snapshot");
  HeightGrid g({0, 20, 0, 10}, 4, 3, 2.0, 4.0);
  g.means()[5] = 1.0 / 3.0;
  g.variances()[7] = 1e-12;
  write_grid_snapshot(g, dir / "g.csv");
  const HeightGrid back = read_grid_snapshot(dir / "g.csv");
  EXPECT_EQ(back.n(), 4);
  EXPECT_EQ(back.m(), 3);
  EXPECT_EQ(back.means(), g.means());
  EXPECT_EQ(back.variances(), g.variances());
  EXPECT_EQ(back.origin(), g.origin());
}

TEST(Io, QualityMapCsv) {
  QualityField f;
  f.lattice = {0, 1, 2, 5, 5, 1};
  f.values = {2.5, std::nullopt};
  std::ostringstream out;
  write_quality_map(f, out);
  EXPECT_EQ(out.str(), "y\\x,0,1\n5,2.5,\n");
}

}  // namespace
}  // namespace pilevol
