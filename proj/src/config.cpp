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

#include "pilevol/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

namespace pilevol {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Binding {
  const char* section;
  const char* key;
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

double parse_double(const std::string& text) {
  const std::string t = text;
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
  if (std::string_view(first, last - first) == "inf") return INFINITY;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError("not a number: '" + text + "'");
  return v;
}

long long parse_int(const std::string& text) {
  const double v = parse_double(text);
  if (v != std::floor(v)) throw ConfigError("not an integer: '" + text + "'");
  return static_cast<long long>(v);
}

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError("not an unsigned integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("not a boolean: '" + text + "'");
}

Binding real(const char* s, const char* k, double& ref) {
  return {s, k, [&ref] { return format_double(ref); }, [&ref](const std::string& v) { ref = parse_double(v); }};
}

Binding integer(const char* s, const char* k, int& ref) {
  return {s, k, [&ref] { return std::to_string(ref); },
          [&ref](const std::string& v) { ref = static_cast<int>(parse_int(v)); }};
}

Binding u64(const char* s, const char* k, std::uint64_t& ref) {
  return {s, k, [&ref] { return std::to_string(ref); }, [&ref](const std::string& v) { ref = parse_u64(v); }};
}

Binding boolean(const char* s, const char* k, bool& ref) {
  return {s, k, [&ref] { return std::string(ref ? "true" : "false"); },
          [&ref](const std::string& v) { ref = parse_bool(v); }};
}

Binding text(const char* s, const char* k, std::string& ref) {
  return {s, k, [&ref] { return ref; }, [&ref](const std::string& v) { ref = v; }};
}

void add_mount(std::vector<Binding>& b, const char* s, MountSpec& m) {
  b.push_back(real(s, "mount_x", m.x));
  b.push_back(real(s, "mount_y", m.y));
  b.push_back(real(s, "mount_z", m.z));
  b.push_back(real(s, "mount_roll_deg", m.roll_deg));
  b.push_back(real(s, "mount_pitch_deg", m.pitch_deg));
  b.push_back(real(s, "mount_yaw_deg", m.yaw_deg));
}

// The one table of config keys; reading and writing both go through it.
std::vector<Binding> bindings(CampaignConfig& c) {
  std::vector<Binding> b;
  b.push_back(real("domain", "x_min", c.domain.x_min));
  b.push_back(real("domain", "x_max", c.domain.x_max));
  b.push_back(real("domain", "y_min", c.domain.y_min));
  b.push_back(real("domain", "y_max", c.domain.y_max));

  b.push_back(text("terrain", "source", c.terrain.source));
  b.push_back(text("terrain", "path", c.terrain.path));
  b.push_back(real("terrain", "cellsize", c.terrain.cellsize));
  b.push_back(real("terrain", "margin", c.terrain.margin));
  b.push_back(real("terrain", "height", c.terrain.height));
  b.push_back(real("terrain", "slope_x", c.terrain.slope_x));
  b.push_back(real("terrain", "slope_y", c.terrain.slope_y));
  b.push_back(real("terrain", "relief", c.terrain.relief));
  b.push_back(u64("terrain", "seed", c.terrain.seed));

  b.push_back(text("features", "source", c.features.source));
  b.push_back(text("features", "path", c.features.path));
  b.push_back(real("features", "wall_x", c.features.wall_x));
  b.push_back(real("features", "y_min", c.features.y_min));
  b.push_back(real("features", "y_max", c.features.y_max));
  b.push_back(integer("features", "cols", c.features.cols));
  b.push_back(real("features", "z_min", c.features.z_min));
  b.push_back(real("features", "z_max", c.features.z_max));
  b.push_back(integer("features", "rows", c.features.rows));
  b.push_back(boolean("features", "occlusion", c.features.occlusion));

  b.push_back(real("camera", "fx", c.camera.fx));
  b.push_back(real("camera", "fy", c.camera.fy));
  b.push_back(real("camera", "cx", c.camera.cx));
  b.push_back(real("camera", "cy", c.camera.cy));
  b.push_back(real("camera", "width", c.camera.width));
  b.push_back(real("camera", "height", c.camera.height));
  b.push_back(real("camera", "pixel_sigma", c.camera.pixel_sigma));
  add_mount(b, "camera", c.camera_mount);

  b.push_back(real("lidar", "angular_resolution", c.lidar.angular_resolution));
  b.push_back(real("lidar", "scan_rate", c.lidar.scan_rate));
  b.push_back(real("lidar", "d_min", c.lidar.d_min));
  b.push_back(real("lidar", "d_max", c.lidar.d_max));
  b.push_back(real("lidar", "angle_variance", c.lidar.angle_variance));
  b.push_back(real("lidar", "range_variance", c.lidar.range_variance));
  b.push_back(integer("lidar", "revolutions", c.revolutions));
  add_mount(b, "lidar", c.lidar_mount);

  b.push_back(real("kernel", "lengthscale", c.kernel.lengthscale));
  b.push_back(real("kernel", "nu", c.kernel.nu));
  b.push_back(real("kernel", "gamma", c.kernel.gamma));
  b.push_back(real("kernel", "slope_sigma", c.kernel.slope_sigma));
  b.push_back(real("kernel", "amplitude", c.kernel.amplitude));
  b.push_back(real("kernel", "update_radius_factor", c.kernel.update_radius_factor));
  b.push_back(real("kernel", "jitter", c.kernel.jitter));
  b.push_back(real("kernel", "variance_floor", c.kernel.variance_floor));

  b.push_back(integer("grid", "nx", c.grid.nx));
  b.push_back(integer("grid", "ny", c.grid.ny));
  b.push_back(real("grid", "prior_variance", c.grid.prior_variance));

  b.push_back(real("feasibility", "tau", c.feasibility.tau));
  b.push_back(integer("feasibility", "min_features", c.feasibility.min_features));
  b.push_back(real("feasibility", "x_min", c.feasibility.bounds.min.x()));
  b.push_back(real("feasibility", "x_max", c.feasibility.bounds.max.x()));
  b.push_back(real("feasibility", "y_min", c.feasibility.bounds.min.y()));
  b.push_back(real("feasibility", "y_max", c.feasibility.bounds.max.y()));
  b.push_back(real("feasibility", "z_min", c.feasibility.bounds.min.z()));
  b.push_back(real("feasibility", "z_max", c.feasibility.bounds.max.z()));
  b.push_back(real("feasibility", "yaw_min", c.feasibility.bounds.yaw_min));
  b.push_back(real("feasibility", "yaw_max", c.feasibility.bounds.yaw_max));
  static const char* kWeightKeys[6] = {"weight_x", "weight_y", "weight_z",
                                       "weight_roll", "weight_pitch", "weight_yaw"};
  for (int k = 0; k < 6; ++k) {
    b.push_back(real("feasibility", kWeightKeys[k], c.feasibility.trace_weights[k]));
  }

  b.push_back(real("planner", "step_radius", c.planner.step_radius));
  b.push_back(integer("planner", "candidates", c.planner.candidates));
  b.push_back(boolean("planner", "include_stay", c.planner.include_stay));
  b.push_back(real("planner", "z", c.planner.z));
  b.push_back(real("planner", "yaw", c.planner.yaw));
  b.push_back(integer("planner", "horizon", c.planner.horizon));
  b.push_back(real("planner", "nominal_height", c.planner.nominal_height));
  b.push_back(real("planner", "target_ratio", c.planner.target_ratio));
  b.push_back(real("planner", "start_x", c.start_x));
  b.push_back(real("planner", "start_y", c.start_y));

  b.push_back(real("square_wave", "pitch", c.square_wave.pitch));
  b.push_back(real("square_wave", "step", c.square_wave.step));

  b.push_back(u64("campaign", "seed", c.seed));
  b.push_back({"campaign", "mode", [&c] { return to_string(c.mode); },
               [&c](const std::string& v) { c.mode = parse_mode(v); }});
  b.push_back(integer("campaign", "max_localization_failures", c.max_localization_failures));
  b.push_back({"campaign", "checkpoints",
               [&c] {
                 std::string out;
                 for (std::size_t k = 0; k < c.checkpoints.size(); ++k) {
                   out += (k ? "," : "") + std::to_string(c.checkpoints[k]);
                 }
                 return out;
               },
               [&c](const std::string& v) {
                 c.checkpoints.clear();
                 std::stringstream ss(v);
                 std::string item;
                 while (std::getline(ss, item, ',')) {
                   if (!item.empty()) c.checkpoints.push_back(static_cast<int>(parse_int(item)));
                 }
               }});
  b.push_back(boolean("campaign", "log_measurements", c.log_measurements));
  return b;
}

void sync_mounts(CampaignConfig& c) {
  c.camera.mount = c.camera_mount.transform();
  c.lidar.mount = c.lidar_mount.transform();
}

}  // namespace

RigidTransform MountSpec::transform() const {
  return RigidTransform::from_rpy({x, y, z}, roll_deg * kDeg, pitch_deg * kDeg, yaw_deg * kDeg);
}

std::string to_string(CampaignMode mode) {
  return mode == CampaignMode::kGreedy ? "greedy" : "square_wave";
}

CampaignMode parse_mode(const std::string& text) {
  if (text == "greedy") return CampaignMode::kGreedy;
  if (text == "square_wave" || text == "square-wave") return CampaignMode::kSquareWave;
  throw ConfigError("unknown campaign mode '" + text + "' (greedy | square_wave)");
}

CampaignConfig::CampaignConfig() {
  feasibility.tau = 3.5;
  feasibility.bounds.min = {0.0, 0.0, 0.0};
  feasibility.bounds.max = {20.0, 20.0, 12.0};
  sync_mounts(*this);
}

void CampaignConfig::validate() const {
  domain.validate();
  camera.validate();
  lidar.validate();
  feasibility.validate();
  planner.validate();
  KernelConfig k = kernel;
  if (k.lengthscale == 0.0) k.lengthscale = 1.0;
  if (k.slope_sigma < 0.0) k.slope_sigma = 0.0;
  k.validate();
  if (grid.nx < 1 || grid.ny < 1) throw ConfigError("grid needs at least one node per axis");
  if (!(grid.prior_variance > 0.0)) throw ConfigError("grid prior variance must be positive");
  if (revolutions < 1) throw ConfigError("lidar revolutions must be at least 1");
  if (max_localization_failures < 1) throw ConfigError("max_localization_failures must be positive");
  if (!(square_wave.pitch > 0.0) || !(square_wave.step > 0.0)) {
    throw ConfigError("square wave pitch and step must be positive");
  }
  if (features.source != "wall" && features.source != "file") {
    throw ConfigError("features.source must be wall or file");
  }
}

std::vector<Setting> settings(const CampaignConfig& cfg) {
  CampaignConfig copy = cfg;
  std::vector<Setting> out;
  for (const auto& b : bindings(copy)) out.push_back({b.section, b.key, b.get()});
  return out;
}

void apply_setting(CampaignConfig& cfg, const std::string& section, const std::string& key,
                   const std::string& value) {
  for (auto& b : bindings(cfg)) {
    if (section == b.section && key == b.key) {
      try {
        b.set(value);
      } catch (const ConfigError& e) {
        throw ConfigError(section + "." + key + ": " + e.what());
      }
      sync_mounts(cfg);
      return;
    }
  }
  throw ConfigError("unknown config key " + section + "." + key);
}

CampaignConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  CampaignConfig cfg;
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    const auto& root = j.contains("config") ? j.at("config") : j;
    for (const auto& [section, entries] : root.items()) {
      for (const auto& [key, value] : entries.items()) {
        apply_setting(cfg, section, key, value.is_string() ? value.get<std::string>() : value.dump());
      }
    }
    return cfg;
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  for (const auto& [section, entries] : tree) {
    if (entries.empty()) throw ConfigError("key '" + section + "' must live inside a [section]");
    for (const auto& [key, value] : entries) {
      apply_setting(cfg, section, key, value.get_value<std::string>());
    }
  }
  return cfg;
}

void write_config(const CampaignConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path.string());
  std::string section;
  for (const auto& s : settings(cfg)) {
    if (s.section != section) {
      out << (section.empty() ? "" : "\n") << "[" << s.section << "]\n";
      section = s.section;
    }
    out << s.key << " = " << s.value << "\n";
  }
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace pilevol
