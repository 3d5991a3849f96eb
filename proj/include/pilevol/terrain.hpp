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

#ifndef PILEVOL_TERRAIN_HPP
#define PILEVOL_TERRAIN_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "pilevol/lidar.hpp"
#include "pilevol/localization.hpp"
#include "pilevol/surface_model.hpp"

namespace pilevol {

/// Node lattice: nx x ny nodes starting at origin with the given spacing.
struct TerrainLattice {
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double spacing_x = 1.0;
  double spacing_y = 1.0;
  int nx = 2;
  int ny = 2;

  /// Lattice covering `domain` expanded by `margin`, spacing at most `cellsize`.
  static TerrainLattice covering(const Domain& domain, double margin, double cellsize);
};

/**
 * @brief Ground-truth heightmap with bilinear interpolation between nodes.
 *
 * Heights are stored row-major over y: heights[j * nx + i] is node
 * (origin.x + i * spacing_x, origin.y + j * spacing_y).
 */
class Terrain {
 public:
  Terrain(const TerrainLattice& lattice, std::vector<double> heights);

  const TerrainLattice& lattice() const { return lattice_; }
  double node_height(int i, int j) const {
    return heights_[static_cast<std::size_t>(j) * lattice_.nx + i];
  }
  const std::vector<double>& heights() const { return heights_; }
  double min_height() const { return min_height_; }
  double max_height() const { return max_height_; }
  double x_max() const { return lattice_.origin.x() + (lattice_.nx - 1) * lattice_.spacing_x; }
  double y_max() const { return lattice_.origin.y() + (lattice_.ny - 1) * lattice_.spacing_y; }
  bool covers(const Domain& domain) const;

  /// Bilinear height, or nullopt outside the lattice.
  std::optional<double> height_at(double x, double y) const;

 private:
  TerrainLattice lattice_;
  std::vector<double> heights_;
  double min_height_ = 0.0;
  double max_height_ = 0.0;
};

/**
 * Distance to the first intersection of the ray with the surface within
 * max_range: fixed-step marching at half the lattice spacing, refined by
 * bisection.  nullopt on a miss.
 */
std::optional<double> raycast(const Terrain& terrain, const Eigen::Vector3d& origin,
                              const Eigen::Vector3d& direction, double max_range);

/// Adapter for scan_sweep.
RangeOracle terrain_oracle(const Terrain& terrain);
/// Occlusion test between two points against the terrain surface.
OcclusionTest terrain_occlusion(const Terrain& terrain);

/// Zero-mean normal fit to the pooled central-difference slopes.
double slope_sigma(const Terrain& terrain);

/// Composite midpoint quadrature of the bilinear surface over the domain.
double true_volume(const Terrain& terrain, const Domain& domain, int refinement = 8);

struct Bump {
  double x = 0.0;
  double y = 0.0;
  double height = 1.0;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double angle = 0.0;  ///< rotation of the bump axes [rad]
};

Terrain flat_terrain(const TerrainLattice& lattice, double height);
Terrain ramp_terrain(const TerrainLattice& lattice, double base, double slope_x, double slope_y);
Terrain bump_terrain(const TerrainLattice& lattice, double base, const std::vector<Bump>& bumps);
/// Random-phase spectral noise with power-law amplitude falloff.
Terrain fractal_terrain(const TerrainLattice& lattice, std::uint64_t seed, double amplitude,
                        double beta = 3.5, int waves = 256);
/**
 * Mountain-range-like pile over the domain: a few elongated ridges plus fractal
 * roughness, non-negative, peak height `relief`.
 */
Terrain alps_terrain(const TerrainLattice& lattice, const Domain& domain, std::uint64_t seed,
                     double relief);

/// Features on the vertical plane x = wall_x, `cols` x `rows` evenly spaced.
FeatureMap feature_wall(double wall_x, double y_min, double y_max, int cols, double z_min,
                        double z_max, int rows, int first_id = 0);

}  // namespace pilevol

#endif  // PILEVOL_TERRAIN_HPP
