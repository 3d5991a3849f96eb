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

#ifndef PILEVOL_IO_HPP
#define PILEVOL_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "pilevol/lidar.hpp"
#include "pilevol/localization.hpp"
#include "pilevol/surface_model.hpp"
#include "pilevol/terrain.hpp"

namespace pilevol {

/// CSV with columns id,x,y,z in the global frame [m]; '#' lines are comments.
FeatureMap read_feature_map(const std::filesystem::path& path);
void write_feature_map(const FeatureMap& map, const std::filesystem::path& path);

/**
 * ESRI ASCII grid.  Both xllcorner/yllcorner and xllcenter/yllcenter headers
 * are accepted; the first data row is the northernmost (largest y).  NODATA
 * cells are rejected since the surface must be complete.
 */
Terrain read_ascii_grid(const std::filesystem::path& path);
void write_ascii_grid(const Terrain& terrain, const std::filesystem::path& path);

/// Header lines (N, M, origin, spacing, cell area) then mean and variance blocks, one row per i.
void write_grid_snapshot(const HeightGrid& grid, std::ostream& out);
void write_grid_snapshot(const HeightGrid& grid, const std::filesystem::path& path);
HeightGrid read_grid_snapshot(const std::filesystem::path& path);

/// Header row "y\x" followed by x values; one row per y; infeasible cells are empty.
void write_quality_map(const QualityField& field, std::ostream& out);

struct LoggedMeasurement {
  int step = 0;
  SurfaceMeasurement measurement;
};

void write_measurement_log(const std::vector<LoggedMeasurement>& log, const std::filesystem::path& path);

}  // namespace pilevol

#endif  // PILEVOL_IO_HPP
