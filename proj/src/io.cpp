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

#include "pilevol/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "pilevol/config.hpp"

namespace pilevol {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& text, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (text.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(path.string() + ": bad number '" + text + "'");
  }
}

void write_row(std::ostream& out, const std::vector<double>& values, std::size_t begin,
               std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    out << (k ? "," : "") << format_double(values[begin + k]);
  }
  out << "\n";
}

}  // namespace

FeatureMap read_feature_map(const std::filesystem::path& path) {
  auto in = open_in(path);
  FeatureMap map;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("id", 0) == 0) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw ConfigError(path.string() + ": expected id,x,y,z in '" + line + "'");
    map.add({static_cast<int>(to_double(f[0], path)),
             {to_double(f[1], path), to_double(f[2], path), to_double(f[3], path)}});
  }
  return map;
}

void write_feature_map(const FeatureMap& map, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "# frame: global, units: meters\nid,x,y,z\n";
  for (const auto& f : map.features()) {
    out << f.id << "," << format_double(f.position.x()) << "," << format_double(f.position.y())
        << "," << format_double(f.position.z()) << "\n";
  }
}

Terrain read_ascii_grid(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::map<std::string, double> header;
  // Header entries in any order, keys case-insensitive; the first numeric token starts the data.
  std::string pending;
  for (std::string key; in >> key;) {
    if (!std::isalpha(static_cast<unsigned char>(key[0]))) {
      pending = key;
      break;
    }
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    std::string value;
    if (!(in >> value)) throw ConfigError(path.string() + ": header '" + key + "' has no value");
    header[key] = to_double(value, path);
  }
  auto need = [&](const std::string& k) {
    auto it = header.find(k);
    if (it == header.end()) throw ConfigError(path.string() + ": missing header '" + k + "'");
    return it->second;
  };
  const int ncols = static_cast<int>(need("ncols"));
  const int nrows = static_cast<int>(need("nrows"));
  const double cell = need("cellsize");
  const auto nd = header.find("nodata_value");
  const std::optional<double> nodata =
      nd == header.end() ? std::nullopt : std::optional<double>(nd->second);
  if (ncols < 2 || nrows < 2 || !(cell > 0.0)) {
    throw ConfigError(path.string() + ": grid needs at least 2x2 cells and a positive cellsize");
  }
  TerrainLattice lattice;
  lattice.nx = ncols;
  lattice.ny = nrows;
  lattice.spacing_x = lattice.spacing_y = cell;
  if (header.count("xllcenter")) {
    lattice.origin = {need("xllcenter"), need("yllcenter")};
  } else {
    lattice.origin = {need("xllcorner") + 0.5 * cell, need("yllcorner") + 0.5 * cell};
  }
  std::vector<double> heights(static_cast<std::size_t>(ncols) * nrows);
  for (int row = 0; row < nrows; ++row) {
    const int j = nrows - 1 - row;
    for (int i = 0; i < ncols; ++i) {
      std::string token = std::exchange(pending, std::string());
      if (token.empty() && !(in >> token)) throw ConfigError(path.string() + ": truncated data");
      const double h = to_double(token, path);
      if ((nodata && h == *nodata) || !std::isfinite(h)) {
        throw ConfigError(path.string() + ": NODATA at row " + std::to_string(row) + ", column " +
                          std::to_string(i));
      }
      heights[static_cast<std::size_t>(j) * ncols + i] = h;
    }
  }
  return Terrain(lattice, std::move(heights));
}

void write_ascii_grid(const Terrain& terrain, const std::filesystem::path& path) {
  const auto& l = terrain.lattice();
  if (std::abs(l.spacing_x - l.spacing_y) > 1e-12 * l.spacing_x) {
    throw ConfigError("ASCII grid export needs square cells");
  }
  auto out = open_out(path);
  out << "ncols " << l.nx << "\nnrows " << l.ny << "\nxllcenter " << format_double(l.origin.x())
      << "\nyllcenter " << format_double(l.origin.y()) << "\ncellsize " << format_double(l.spacing_x)
      << "\nNODATA_value -9999\n";
  for (int j = l.ny - 1; j >= 0; --j) {
    for (int i = 0; i < l.nx; ++i) out << (i ? " " : "") << format_double(terrain.node_height(i, j));
    out << "\n";
  }
}

void write_grid_snapshot(const HeightGrid& grid, std::ostream& out) {
  out << "N," << grid.n() << "\nM," << grid.m() << "\norigin," << format_double(grid.origin().x())
      << "," << format_double(grid.origin().y()) << "\nspacing," << format_double(grid.spacing_x())
      << "," << format_double(grid.spacing_y()) << "\ncell_area," << format_double(grid.cell_area())
      << "\nmean\n";
  const auto m = static_cast<std::size_t>(grid.m());
  for (int i = 0; i < grid.n(); ++i) write_row(out, grid.means(), i * m, m);
  out << "variance\n";
  for (int i = 0; i < grid.n(); ++i) write_row(out, grid.variances(), i * m, m);
}

void write_grid_snapshot(const HeightGrid& grid, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_grid_snapshot(grid, out);
}

HeightGrid read_grid_snapshot(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  auto fields = [&](const std::string& name) {
    if (!std::getline(in, line)) throw ConfigError(path.string() + ": truncated snapshot");
    auto f = split(line, ',');
    if (f.empty() || f[0] != name) throw ConfigError(path.string() + ": expected '" + name + "'");
    return f;
  };
  const int n = static_cast<int>(to_double(fields("N").at(1), path));
  const int m = static_cast<int>(to_double(fields("M").at(1), path));
  const auto o = fields("origin");
  const auto s = fields("spacing");
  fields("cell_area");
  auto block = [&](const std::string& name) {
    fields(name);
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw ConfigError(path.string() + ": truncated " + name);
      const auto row = split(line, ',');
      if (static_cast<int>(row.size()) != m) throw ConfigError(path.string() + ": ragged " + name);
      for (const auto& t : row) v.push_back(to_double(t, path));
    }
    return v;
  };
  auto mean = block("mean");
  auto var = block("variance");
  return HeightGrid(n, m, {to_double(o.at(1), path), to_double(o.at(2), path)},
                    to_double(s.at(1), path), to_double(s.at(2), path), std::move(mean),
                    std::move(var));
}

void write_quality_map(const QualityField& field, std::ostream& out) {
  const auto& l = field.lattice;
  out << "y\\x";
  for (int i = 0; i < l.nx; ++i) out << "," << format_double(l.x(i));
  out << "\n";
  for (int j = 0; j < l.ny; ++j) {
    out << format_double(l.y(j));
    for (int i = 0; i < l.nx; ++i) {
      out << ",";
      if (const auto& q = field.at(i, j)) out << format_double(*q);
    }
    out << "\n";
  }
}

void write_measurement_log(const std::vector<LoggedMeasurement>& log,
                           const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "step,alpha,d_l,x,y,z,s_xx,s_xy,s_xz,s_yy,s_yz,s_zz,sigma_z2\n";
  for (const auto& e : log) {
    const auto& m = e.measurement;
    const auto& c = m.covariance;
    out << e.step << "," << format_double(m.alpha) << "," << format_double(m.range);
    for (int k = 0; k < 3; ++k) out << "," << format_double(m.point[k]);
    for (int r = 0; r < 3; ++r) {
      for (int s = r; s < 3; ++s) out << "," << format_double(c(r, s));
    }
    out << "," << format_double(m.height_variance) << "\n";
  }
}

}  // namespace pilevol
