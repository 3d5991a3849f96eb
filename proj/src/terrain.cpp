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

#include "pilevol/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace pilevol {

TerrainLattice TerrainLattice::covering(const Domain& domain, double margin, double cellsize) {
  if (!(cellsize > 0.0) || !(margin >= 0.0)) {
    throw ConfigError("terrain cellsize must be positive and margin non-negative");
  }
  TerrainLattice t;
  const double w = domain.width() + 2.0 * margin;
  const double d = domain.depth() + 2.0 * margin;
  t.nx = static_cast<int>(std::ceil(w / cellsize - 1e-9)) + 1;
  t.ny = static_cast<int>(std::ceil(d / cellsize - 1e-9)) + 1;
  t.spacing_x = w / (t.nx - 1);
  t.spacing_y = d / (t.ny - 1);
  t.origin = {domain.x_min - margin, domain.y_min - margin};
  return t;
}

Terrain::Terrain(const TerrainLattice& lattice, std::vector<double> heights)
    : lattice_(lattice), heights_(std::move(heights)) {
  if (lattice.nx < 2 || lattice.ny < 2) throw ConfigError("terrain lattice must be at least 2x2");
  if (!(lattice.spacing_x > 0.0) || !(lattice.spacing_y > 0.0)) {
    throw ConfigError("terrain spacing must be positive");
  }
  if (heights_.size() != static_cast<std::size_t>(lattice.nx) * lattice.ny) {
    throw ConfigError("terrain height count does not match the lattice");
  }
  for (double h : heights_) {
    if (!std::isfinite(h)) throw ConfigError("terrain heights must be finite");
  }
  const auto [lo, hi] = std::minmax_element(heights_.begin(), heights_.end());
  min_height_ = *lo;
  max_height_ = *hi;
}

bool Terrain::covers(const Domain& domain) const {
  constexpr double tol = 1e-9;
  return domain.x_min >= lattice_.origin.x() - tol && domain.x_max <= x_max() + tol &&
         domain.y_min >= lattice_.origin.y() - tol && domain.y_max <= y_max() + tol;
}

std::optional<double> Terrain::height_at(double x, double y) const {
  const double u = (x - lattice_.origin.x()) / lattice_.spacing_x;
  const double v = (y - lattice_.origin.y()) / lattice_.spacing_y;
  if (!(u >= 0.0) || !(v >= 0.0) || u > lattice_.nx - 1 || v > lattice_.ny - 1) return std::nullopt;
  const int i = std::min(static_cast<int>(u), lattice_.nx - 2);
  const int j = std::min(static_cast<int>(v), lattice_.ny - 2);
  const double fu = u - i;
  const double fv = v - j;
  return (1.0 - fu) * (1.0 - fv) * node_height(i, j) + fu * (1.0 - fv) * node_height(i + 1, j) +
         (1.0 - fu) * fv * node_height(i, j + 1) + fu * fv * node_height(i + 1, j + 1);
}

std::optional<double> raycast(const Terrain& terrain, const Eigen::Vector3d& origin,
                              const Eigen::Vector3d& direction, double max_range) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) throw NumericError("ray direction must be unit length");
  const double h_min = terrain.min_height();
  const double h_max = terrain.max_height();

  // The ray can only meet the surface while its height is within [h_min, h_max].
  double t_begin = 0.0;
  double t_end = max_range;
  if (direction.z() >= 0.0) {
    if (origin.z() > h_max) return std::nullopt;
  } else {
    if (origin.z() > h_max) t_begin = (origin.z() - h_max) / -direction.z();
    t_end = std::min(t_end, (origin.z() - h_min) / -direction.z());
  }
  if (t_begin > max_range) return std::nullopt;

  auto below = [&](double t) {
    const Eigen::Vector3d p = origin + t * direction;
    const auto h = terrain.height_at(p.x(), p.y());
    return h && p.z() <= *h;
  };

  if (below(0.0)) return 0.0;
  const double step = 0.5 * std::min(terrain.lattice().spacing_x, terrain.lattice().spacing_y);
  // Everything before t_begin is above the highest node, so this start is not below.
  double t_prev = std::max(0.0, t_begin - step);
  const double t_limit = std::min(max_range, t_end + step);
  for (double t = t_prev + step;; t += step) {
    t = std::min(t, t_limit);
    if (below(t)) {
      double lo = t_prev;
      double hi = t;
      while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        (below(mid) ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
    if (t >= t_limit) return std::nullopt;
    t_prev = t;
  }
}

RangeOracle terrain_oracle(const Terrain& terrain) {
  return [&terrain](const Eigen::Vector3d& o, const Eigen::Vector3d& d, double max_range) {
    return raycast(terrain, o, d, max_range);
  };
}

OcclusionTest terrain_occlusion(const Terrain& terrain) {
  return [&terrain](const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
    const Eigen::Vector3d delta = to - from;
    const double dist = delta.norm();
    if (dist == 0.0) return false;
    const auto hit = raycast(terrain, from, delta / dist, dist);
    return hit.has_value() && *hit < dist - 1e-6;
  };
}

double slope_sigma(const Terrain& terrain) {
  const auto& lat = terrain.lattice();
  double sum_sq = 0.0;
  std::size_t count = 0;
  if (lat.nx >= 3 && lat.ny >= 3) {
    for (int j = 1; j < lat.ny - 1; ++j) {
      for (int i = 1; i < lat.nx - 1; ++i) {
        const double sx = (terrain.node_height(i + 1, j) - terrain.node_height(i - 1, j)) /
                          (2.0 * lat.spacing_x);
        const double sy = (terrain.node_height(i, j + 1) - terrain.node_height(i, j - 1)) /
                          (2.0 * lat.spacing_y);
        sum_sq += sx * sx + sy * sy;
        count += 2;
      }
    }
  } else {
    // Too small for central differences: one-sided slopes on every edge.
    for (int j = 0; j < lat.ny; ++j) {
      for (int i = 0; i + 1 < lat.nx; ++i) {
        const double s = (terrain.node_height(i + 1, j) - terrain.node_height(i, j)) / lat.spacing_x;
        sum_sq += s * s;
        ++count;
      }
    }
    for (int j = 0; j + 1 < lat.ny; ++j) {
      for (int i = 0; i < lat.nx; ++i) {
        const double s = (terrain.node_height(i, j + 1) - terrain.node_height(i, j)) / lat.spacing_y;
        sum_sq += s * s;
        ++count;
      }
    }
  }
  return std::sqrt(sum_sq / static_cast<double>(count));
}

double true_volume(const Terrain& terrain, const Domain& domain, int refinement) {
  if (refinement < 1) throw ConfigError("quadrature refinement must be at least 1");
  if (!terrain.covers(domain)) throw DomainError("terrain lattice does not cover the domain");
  const auto& lat = terrain.lattice();
  const int nx = static_cast<int>(std::ceil(domain.width() / lat.spacing_x - 1e-9)) * refinement;
  const int ny = static_cast<int>(std::ceil(domain.depth() / lat.spacing_y - 1e-9)) * refinement;
  const double dx = domain.width() / nx;
  const double dy = domain.depth() / ny;
  double sum = 0.0;
  for (int j = 0; j < ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < nx; ++i) {
      row += *terrain.height_at(domain.x_min + (i + 0.5) * dx, domain.y_min + (j + 0.5) * dy);
    }
    sum += row;
  }
  return sum * dx * dy;
}

namespace {

template <typename Fn>
Terrain tabulate(const TerrainLattice& lattice, Fn&& fn) {
  std::vector<double> h(static_cast<std::size_t>(lattice.nx) * lattice.ny);
  for (int j = 0; j < lattice.ny; ++j) {
    for (int i = 0; i < lattice.nx; ++i) {
      h[static_cast<std::size_t>(j) * lattice.nx + i] =
          fn(lattice.origin.x() + i * lattice.spacing_x, lattice.origin.y() + j * lattice.spacing_y);
    }
  }
  return Terrain(lattice, std::move(h));
}

double bump_height(const Bump& b, double x, double y) {
  const double c = std::cos(b.angle);
  const double s = std::sin(b.angle);
  const double u = (c * (x - b.x) + s * (y - b.y)) / b.sigma_x;
  const double v = (-s * (x - b.x) + c * (y - b.y)) / b.sigma_y;
  return b.height * std::exp(-0.5 * (u * u + v * v));
}

}  // namespace

Terrain flat_terrain(const TerrainLattice& lattice, double height) {
  return tabulate(lattice, [&](double, double) { return height; });
}

Terrain ramp_terrain(const TerrainLattice& lattice, double base, double slope_x, double slope_y) {
  return tabulate(lattice, [&](double x, double y) { return base + slope_x * x + slope_y * y; });
}

Terrain bump_terrain(const TerrainLattice& lattice, double base, const std::vector<Bump>& bumps) {
  return tabulate(lattice, [&](double x, double y) {
    double h = base;
    for (const auto& b : bumps) h += bump_height(b, x, y);
    return h;
  });
}

Terrain fractal_terrain(const TerrainLattice& lattice, std::uint64_t seed, double amplitude,
                        double beta, int waves) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double extent = std::max((lattice.nx - 1) * lattice.spacing_x, (lattice.ny - 1) * lattice.spacing_y);
  const double f_lo = 1.0 / extent;
  const double f_hi = 0.25 / std::min(lattice.spacing_x, lattice.spacing_y);

  struct Wave {
    double kx, ky, phase, amp;
  };
  std::vector<Wave> w(static_cast<std::size_t>(waves));
  for (auto& wave : w) {
    const double f = f_lo * std::pow(f_hi / f_lo, unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    wave.kx = 2.0 * std::numbers::pi * f * std::cos(theta);
    wave.ky = 2.0 * std::numbers::pi * f * std::sin(theta);
    wave.phase = 2.0 * std::numbers::pi * unit(rng);
    // Log-uniform frequency sampling contributes one power of f to the density.
    wave.amp = std::pow(f, -(beta - 1.0) / 2.0);
  }
  Terrain raw = tabulate(lattice, [&](double x, double y) {
    double h = 0.0;
    for (const auto& wave : w) h += wave.amp * std::sin(wave.kx * x + wave.ky * y + wave.phase);
    return h;
  });
  double mean = 0.0;
  for (double h : raw.heights()) mean += h;
  mean /= static_cast<double>(raw.heights().size());
  double var = 0.0;
  for (double h : raw.heights()) var += (h - mean) * (h - mean);
  const double rms = std::sqrt(var / static_cast<double>(raw.heights().size()));
  std::vector<double> scaled = raw.heights();
  for (double& h : scaled) h = rms > 0.0 ? amplitude * (h - mean) / rms : 0.0;
  return Terrain(lattice, std::move(scaled));
}

Terrain alps_terrain(const TerrainLattice& lattice, const Domain& domain, std::uint64_t seed,
                     double relief) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double size = std::min(domain.width(), domain.depth());
  std::vector<Bump> ridges;
  for (int k = 0; k < 7; ++k) {
    Bump b;
    b.x = domain.x_min + domain.width() * (0.15 + 0.7 * unit(rng));
    b.y = domain.y_min + domain.depth() * (0.15 + 0.7 * unit(rng));
    b.height = 0.4 + 0.6 * unit(rng);
    b.sigma_x = size * (0.06 + 0.06 * unit(rng));
    b.sigma_y = size * (0.15 + 0.15 * unit(rng));
    b.angle = std::numbers::pi * unit(rng);
    ridges.push_back(b);
  }
  const Terrain base = bump_terrain(lattice, 0.0, ridges);
  const Terrain rough = fractal_terrain(lattice, seed ^ 0x5bd1e995ULL, 0.08, 4.0);
  std::vector<double> h(base.heights().size());
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = std::max(0.0, base.heights()[k] + rough.heights()[k]);
  const double peak = *std::max_element(h.begin(), h.end());
  if (peak > 0.0) {
    for (double& v : h) v *= relief / peak;
  }
  return Terrain(lattice, std::move(h));
}

FeatureMap feature_wall(double wall_x, double y_min, double y_max, int cols, double z_min,
                        double z_max, int rows, int first_id) {
  if (cols < 1 || rows < 1) throw ConfigError("feature wall needs at least one row and column");
  FeatureMap map;
  int id = first_id;
  for (int r = 0; r < rows; ++r) {
    const double z = rows == 1 ? 0.5 * (z_min + z_max) : z_min + (z_max - z_min) * r / (rows - 1);
    for (int c = 0; c < cols; ++c) {
      const double y = cols == 1 ? 0.5 * (y_min + y_max) : y_min + (y_max - y_min) * c / (cols - 1);
      map.add({id++, {wall_x, y, z}});
    }
  }
  return map;
}

}  // namespace pilevol
