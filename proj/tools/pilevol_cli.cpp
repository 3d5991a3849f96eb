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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pilevol/campaign.hpp"
#include "pilevol/config.hpp"
#include "pilevol/io.hpp"
#include "pilevol/validate.hpp"

namespace {

using namespace pilevol;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "sectioned key-value config or run manifest")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "override one key, section.key=value (repeatable)");
  cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)");
}

CampaignConfig load(const Common& c) {
  CampaignConfig cfg = c.config.empty() ? CampaignConfig() : load_config(c.config);
  for (const auto& o : c.overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw CLI::ValidationError("--set", "expected section.key=value, got '" + o + "'");
    }
    apply_setting(cfg, o.substr(0, dot), o.substr(dot + 1, eq - dot - 1), o.substr(eq + 1));
  }
  return cfg;
}

std::ostream* open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file.open(path);
  if (!file) throw ConfigError("cannot write " + path);
  return &file;
}

int report_validation(const ValidationResult& r, const std::string& what) {
  for (const auto& f : r.failures) std::cerr << "FAIL " << f << "\n";
  std::cout << what << ": " << (r.ok() ? "ok" : "FAILED") << " (" << r.checks << " checks, "
            << r.failures.size() << " failures)\n";
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pilevol: drone LiDAR stockpile volume estimation and planning simulator"};
  app.require_subcommand(1, 1);

  Common run_opts;
  std::string run_mode, run_out;
  std::optional<std::uint64_t> run_seed;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "fly a campaign and write its report");
  add_common(run, run_opts);
  run->add_option("--mode", run_mode, "greedy | square_wave");
  run->add_option("--seed", run_seed, "campaign seed");
  run->add_option("--out", run_out, "output directory (default $PILEVOL_OUTPUT_DIR or pilevol_out)");
  run->add_flag("--quiet", quiet, "no per-step progress on stderr");

  Common qmap_opts;
  std::optional<double> qmap_z, qmap_yaw;
  int qmap_nx = 41, qmap_ny = 41;
  std::string qmap_out;
  auto* qmap = app.add_subcommand("qmap", "quality-of-fix map over the domain at fixed z and yaw");
  add_common(qmap, qmap_opts);
  qmap->add_option("--z", qmap_z, "altitude [m] (default planner.z)");
  qmap->add_option("--yaw", qmap_yaw, "yaw [rad] (default planner.yaw)");
  qmap->add_option("--nx", qmap_nx, "lattice columns")->check(CLI::Range(1, 100000));
  qmap->add_option("--ny", qmap_ny, "lattice rows")->check(CLI::Range(1, 100000));
  qmap->add_option("--out", qmap_out, "CSV file (default stdout)");

  Common sweep_opts;
  double sweep_x = 0.0, sweep_y = 0.0;
  std::optional<double> sweep_z, sweep_yaw;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "one LiDAR revolution at a pose, as a measurement log");
  add_common(sweep, sweep_opts);
  sweep->add_option("--x", sweep_x, "x [m]")->required();
  sweep->add_option("--y", sweep_y, "y [m]")->required();
  sweep->add_option("--z", sweep_z, "z [m] (default planner.z)");
  sweep->add_option("--yaw", sweep_yaw, "yaw [rad] (default planner.yaw)");
  sweep->add_option("--out", sweep_out, "CSV file (default stdout)");

  Common truth_opts;
  auto* truth = app.add_subcommand("truth", "true volume and terrain statistics");
  add_common(truth, truth_opts);

  Common gen_opts;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-terrain", "write the configured terrain as an ASCII grid");
  add_common(gen, gen_opts);
  gen->add_option("--out", gen_out, "ASCII grid file")->required();

  Common val_opts;
  std::string val_run;
  auto* val = app.add_subcommand("validate", "check a run directory, or a config before flying");
  add_common(val, val_opts);
  val->add_option("--run", val_run, "run directory holding manifest.json")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) {
      CampaignConfig cfg = load(run_opts);
      if (!run_mode.empty()) cfg.mode = parse_mode(run_mode);
      if (run_seed) cfg.seed = *run_seed;
      const std::filesystem::path out = run_out.empty() ? default_output_dir() : std::filesystem::path(run_out);
      ProgressFn progress;
      if (!quiet) {
        progress = [](const StepRecord& s) {
          std::fprintf(stderr, "step %3d  (%.3f, %.3f)  q_pos %.4g  mu_V %.4f  sigma_V %.4f\n",
                       s.step, s.waypoint.x, s.waypoint.y, s.q_pos, s.mu, s.sigma);
        };
      }
      const CampaignReport report = run_campaign(cfg, run_opts.threads, progress);
      write_report(report, out);
      const VolumeEstimate v = report.final_estimate();
      std::printf("mode %s  steps %zu  mu_V %.6g  sigma_V %.6g  sigma/mu %.4f%%  true %.6g  rel.err %.4f%%\n",
                  to_string(cfg.mode).c_str(), report.steps.size(), v.mean, v.sigma,
                  100.0 * v.sigma / v.mean, report.true_volume, 100.0 * report.relative_error());
      std::printf("report written to %s\n", out.string().c_str());
      return 0;
    }
    if (*qmap) {
      const CampaignConfig cfg = load(qmap_opts);
      const FeatureMap features = build_features(cfg.features);
      const LatticeSpec lattice{cfg.domain.x_min, cfg.domain.x_max, qmap_nx,
                                cfg.domain.y_min, cfg.domain.y_max, qmap_ny};
      const QualityField field =
          quality_map(features, cfg.camera, qmap_z.value_or(cfg.planner.z),
                      qmap_yaw.value_or(cfg.planner.yaw), lattice, cfg.feasibility.min_features,
                      qmap_opts.threads);
      std::ofstream file;
      write_quality_map(field, *open_output(qmap_out, file));
      return 0;
    }
    if (*sweep) {
      const CampaignConfig cfg = load(sweep_opts);
      const Scene scene = build_scene(cfg);
      const Waypoint wp{sweep_x, sweep_y, sweep_z.value_or(cfg.planner.z),
                        sweep_yaw.value_or(cfg.planner.yaw)};
      const PoseCovariance cov = predicted_covariance(wp.pose(), scene.features, cfg.camera,
                                                      cfg.feasibility.min_features);
      const auto ms = scan_sweep(wp.pose(), wp.pose(), cov, cfg.lidar, terrain_oracle(scene.terrain),
                                 scene.context.kernel.slope_sigma, cfg.seed);
      std::vector<LoggedMeasurement> log;
      for (const auto& m : ms) log.push_back({0, m});
      const std::string path = sweep_out.empty() ? "/dev/stdout" : sweep_out;
      write_measurement_log(log, path);
      return 0;
    }
    if (*truth) {
      const CampaignConfig cfg = load(truth_opts);
      const Scene scene = build_scene(cfg);
      std::printf("true_volume %s\nslope_sigma %s\nlengthscale %s\nmin_height %s\nmax_height %s\n",
                  format_double(scene.true_volume).c_str(),
                  format_double(scene.context.kernel.slope_sigma).c_str(),
                  format_double(scene.context.kernel.lengthscale).c_str(),
                  format_double(scene.terrain.min_height()).c_str(),
                  format_double(scene.terrain.max_height()).c_str());
      return 0;
    }
    if (*gen) {
      const CampaignConfig cfg = load(gen_opts);
      write_ascii_grid(build_terrain(cfg.terrain, cfg.domain), gen_out);
      return 0;
    }
    if (*val) {
      if (!val_run.empty()) return report_validation(validate_run(val_run), val_run);
      return report_validation(validate_config(load(val_opts)), "config");
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
