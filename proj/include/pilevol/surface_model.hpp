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

/*
 * surface_model.hpp
 *
 * Height-grid belief over the pile surface.
 *
 * Every grid node carries an independent normal N(mu, sigma^2).  The nodes act
 * as inducing points of a zero-mean Gaussian process with a truncated Matern
 * correlation, so heights (and therefore the volume) can be predicted anywhere
 * in the domain:
 *
 *   mean = K_*X [K_XX + diag(sigma^2)]^-1 Z
 *   var  = K_** - K_*X [K_XX + diag(sigma^2)]^-1 K_X*
 *
 * New LiDAR returns are pushed into the nodes with a scalar Kalman update whose
 * measurement variance grows with the horizontal distance s to the node:
 *
 *   R(s) = var_z + sigma_t^2 (exp(s / l) - 1)
 */

#ifndef PILEVOL_SURFACE_MODEL_HPP
#define PILEVOL_SURFACE_MODEL_HPP

#include <span>
#include <vector>

#include <Eigen/Core>

#include "pilevol/errors.hpp"
#include "pilevol/lidar.hpp"

namespace pilevol {

/// Axis-aligned rectangle D = [x_min, x_max] x [y_min, y_max].
struct Domain {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double depth() const { return y_max - y_min; }
  double area() const { return width() * depth(); }
  bool contains(double x, double y, double tol = 1e-9) const {
    return x >= x_min - tol && x <= x_max + tol && y >= y_min - tol && y <= y_max + tol;
  }
  void validate() const;
};

struct KernelConfig {
  double lengthscale = 1.0;          ///< l [m]
  double nu = 1.5;                   ///< smoothness
  double gamma = 4.0;                ///< truncation radius in lengthscales
  double slope_sigma = 0.0;          ///< sigma_t, terrain slope std
  double amplitude = 1.0;            ///< prior variance k(0) [m^2]
  double update_radius_factor = 1.0; ///< nodes within this many lengthscales are updated
  double jitter = 1e-9;
  double variance_floor = 1e-12;     ///< [m^2]

  double truncation_radius() const { return gamma * lengthscale; }
  void validate() const;
};

/**
 * @brief N x M lattice of independent height normals at cell centres.
 *
 * Node (i, j) sits at origin + (i * spacing_x, j * spacing_y); i runs along x
 * (N nodes) and j along y (M nodes).  Storage is row-major, index i * M + j.
 */
class HeightGrid {
 public:
  HeightGrid() = default;
  /// Cell-centred lattice covering the domain exactly.
  HeightGrid(const Domain& domain, int n, int m, double prior_mean, double prior_variance);
  /// Raw constructor used when reading snapshots.
  HeightGrid(int n, int m, Eigen::Vector2d origin, double spacing_x, double spacing_y,
             std::vector<double> mean, std::vector<double> variance);

  int n() const { return n_; }
  int m() const { return m_; }
  std::size_t size() const { return mean_.size(); }
  const Eigen::Vector2d& origin() const { return origin_; }
  double spacing_x() const { return spacing_x_; }
  double spacing_y() const { return spacing_y_; }
  double cell_area() const { return spacing_x_ * spacing_y_; }
  Domain domain() const;

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * m_ + j; }
  Eigen::Vector2d node(int i, int j) const {
    return origin_ + Eigen::Vector2d(i * spacing_x_, j * spacing_y_);
  }
  Eigen::Vector2d node(std::size_t k) const {
    return node(static_cast<int>(k / m_), static_cast<int>(k % m_));
  }

  double mean(std::size_t k) const { return mean_[k]; }
  double variance(std::size_t k) const { return variance_[k]; }
  const std::vector<double>& means() const { return mean_; }
  const std::vector<double>& variances() const { return variance_; }
  std::vector<double>& means() { return mean_; }
  std::vector<double>& variances() { return variance_; }

 private:
  int n_ = 0;
  int m_ = 0;
  Eigen::Vector2d origin_ = Eigen::Vector2d::Zero();
  double spacing_x_ = 1.0;
  double spacing_y_ = 1.0;
  std::vector<double> mean_;
  std::vector<double> variance_;
};

/// Matern correlation, exactly zero beyond gamma * l; k(0) = 1.
double matern(double s, const KernelConfig& cfg);
/// Untruncated Matern correlation. Half-integer nu up to 5/2 use closed forms.
double matern_correlation(double s, double nu, double lengthscale);
/// General-nu evaluation through the modified Bessel function K_nu.
double matern_bessel(double s, double nu, double lengthscale);

struct GpPrediction {
  Eigen::VectorXd mean;      ///< [m]
  Eigen::VectorXd variance;  ///< [m^2]
};

/**
 * Sparse GP prediction.  Each query only sees inducing points within
 * gamma * l; the solve is done on that neighbourhood, with one factorization
 * shared by every query that has the same neighbourhood.
 *
 * Throws DomainError for queries outside the grid domain.
 */
GpPrediction gp_predict(const HeightGrid& grid, const KernelConfig& cfg,
                        std::span<const Eigen::Vector2d> queries);

/// Kalman update of every node within update_radius_factor * l of the hit point.
void fuse_measurement(HeightGrid& grid, const KernelConfig& cfg, const SurfaceMeasurement& m);
HeightGrid update_grid(HeightGrid grid, const KernelConfig& cfg, const SurfaceMeasurement& m);

struct VolumeEstimate {
  double mean = 0.0;   ///< mu^V [m^3]
  double sigma = 0.0;  ///< sigma^V [m^3]
};

/**
 * Riemann sums of the GP mean and variance.  With refinement r the prediction
 * lattice has r x r sub-cells per grid cell; r = 1 is the inducing lattice.
 */
VolumeEstimate volume(const HeightGrid& grid, const KernelConfig& cfg, int refinement = 1);

}  // namespace pilevol

#endif  // PILEVOL_SURFACE_MODEL_HPP
