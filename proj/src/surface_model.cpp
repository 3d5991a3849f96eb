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

#include "pilevol/surface_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/Cholesky>

namespace pilevol {

void Domain::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min)) throw ConfigError("domain must have positive extent");
}

void KernelConfig::validate() const {
  if (!(lengthscale > 0.0)) throw ConfigError("kernel lengthscale must be positive");
  if (!(nu > 0.0)) throw ConfigError("kernel nu must be positive");
  if (!(gamma >= 1.0)) throw ConfigError("kernel gamma must be at least 1");
  if (!(amplitude > 0.0)) throw ConfigError("kernel amplitude must be positive");
  if (!(slope_sigma >= 0.0)) throw ConfigError("slope sigma must be non-negative");
  if (!(update_radius_factor > 0.0)) throw ConfigError("update radius factor must be positive");
  if (!(jitter >= 0.0) || !(variance_floor > 0.0)) {
    throw ConfigError("jitter must be non-negative and the variance floor positive");
  }
}

HeightGrid::HeightGrid(const Domain& domain, int n, int m, double prior_mean,
                       double prior_variance)
    : n_(n), m_(m) {
  domain.validate();
  if (n < 1 || m < 1) throw ConfigError("height grid needs at least one node per axis");
  if (!(prior_variance > 0.0)) throw ConfigError("prior variance must be positive");
  spacing_x_ = domain.width() / n;
  spacing_y_ = domain.depth() / m;
  origin_ = {domain.x_min + 0.5 * spacing_x_, domain.y_min + 0.5 * spacing_y_};
  mean_.assign(static_cast<std::size_t>(n) * m, prior_mean);
  variance_.assign(static_cast<std::size_t>(n) * m, prior_variance);
}

HeightGrid::HeightGrid(int n, int m, Eigen::Vector2d origin, double spacing_x, double spacing_y,
                       std::vector<double> mean, std::vector<double> variance)
    : n_(n),
      m_(m),
      origin_(std::move(origin)),
      spacing_x_(spacing_x),
      spacing_y_(spacing_y),
      mean_(std::move(mean)),
      variance_(std::move(variance)) {
  const auto expected = static_cast<std::size_t>(n) * m;
  if (n < 1 || m < 1 || mean_.size() != expected || variance_.size() != expected) {
    throw ConfigError("height grid dimensions do not match its data");
  }
  if (!(spacing_x > 0.0) || !(spacing_y > 0.0)) throw ConfigError("grid spacing must be positive");
  for (double v : variance_) {
    if (!(v > 0.0)) throw ConfigError("grid variances must be strictly positive");
  }
}

Domain HeightGrid::domain() const {
  return {origin_.x() - 0.5 * spacing_x_, origin_.x() + (n_ - 0.5) * spacing_x_,
          origin_.y() - 0.5 * spacing_y_, origin_.y() + (m_ - 0.5) * spacing_y_};
}

double matern_bessel(double s, double nu, double lengthscale) {
  const double x = std::sqrt(2.0 * nu) * s / lengthscale;
  if (x < 1e-10) return 1.0;
  const double k = std::cyl_bessel_k(nu, x);
  if (k == 0.0) return 0.0;
  return std::exp((1.0 - nu) * std::log(2.0) - std::lgamma(nu) + nu * std::log(x)) * k;
}

double matern_correlation(double s, double nu, double lengthscale) {
  if (nu == 0.5) return std::exp(-s / lengthscale);
  if (nu == 1.5) {
    const double x = std::sqrt(3.0) * s / lengthscale;
    return (1.0 + x) * std::exp(-x);
  }
  if (nu == 2.5) {
    const double x = std::sqrt(5.0) * s / lengthscale;
    return (1.0 + x + x * x / 3.0) * std::exp(-x);
  }
  return matern_bessel(s, nu, lengthscale);
}

double matern(double s, const KernelConfig& cfg) {
  if (s > cfg.truncation_radius()) return 0.0;
  return matern_correlation(s, cfg.nu, cfg.lengthscale);
}

namespace {

// Inducing nodes within `radius` of q, in storage order.
std::vector<int> neighbourhood(const HeightGrid& grid, const Eigen::Vector2d& q, double radius) {
  const auto lo = [](double v) { return static_cast<int>(std::ceil(v)); };
  const auto hi = [](double v) { return static_cast<int>(std::floor(v)); };
  const int i0 = std::max(0, lo((q.x() - radius - grid.origin().x()) / grid.spacing_x()));
  const int i1 = std::min(grid.n() - 1, hi((q.x() + radius - grid.origin().x()) / grid.spacing_x()));
  const int j0 = std::max(0, lo((q.y() - radius - grid.origin().y()) / grid.spacing_y()));
  const int j1 = std::min(grid.m() - 1, hi((q.y() + radius - grid.origin().y()) / grid.spacing_y()));
  std::vector<int> out;
  for (int i = i0; i <= i1; ++i) {
    for (int j = j0; j <= j1; ++j) {
      if ((grid.node(i, j) - q).norm() <= radius) out.push_back(static_cast<int>(grid.index(i, j)));
    }
  }
  return out;
}

}  // namespace

GpPrediction gp_predict(const HeightGrid& grid, const KernelConfig& cfg,
                        std::span<const Eigen::Vector2d> queries) {
  const Domain dom = grid.domain();
  const double radius = cfg.truncation_radius();
  const double amp = cfg.amplitude;

  GpPrediction out;
  out.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(queries.size()));
  out.variance = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(queries.size()), amp);

  std::map<std::vector<int>, std::vector<std::size_t>> groups;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto& p = queries[q];
    if (!dom.contains(p.x(), p.y())) {
      throw DomainError("query (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                        ") is outside the grid domain");
    }
    auto nb = neighbourhood(grid, p, radius);
    if (nb.empty()) continue;  // prior: mean 0, variance k(0)
    groups[std::move(nb)].push_back(q);
  }

  for (const auto& [nb, members] : groups) {
    const auto n = static_cast<Eigen::Index>(nb.size());
    // Pairs inside one neighbourhood can be up to 2 gamma l apart; they use the
    // untruncated correlation so the local Gram matrix stays positive definite.
    Eigen::MatrixXd gram(n, n);
    Eigen::VectorXd z(n);
    for (Eigen::Index a = 0; a < n; ++a) {
      const Eigen::Vector2d pa = grid.node(static_cast<std::size_t>(nb[a]));
      gram(a, a) = amp + grid.variance(nb[a]) + cfg.jitter;
      z[a] = grid.mean(nb[a]);
      for (Eigen::Index b = 0; b < a; ++b) {
        const double s = (pa - grid.node(static_cast<std::size_t>(nb[b]))).norm();
        gram(a, b) = gram(b, a) = amp * matern_correlation(s, cfg.nu, cfg.lengthscale);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw NumericError("local GP covariance is not positive definite");
    }
    const Eigen::VectorXd weights = llt.solve(z);

    const auto nq = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd cross(n, nq);
    for (Eigen::Index c = 0; c < nq; ++c) {
      const auto& p = queries[members[c]];
      for (Eigen::Index a = 0; a < n; ++a) {
        cross(a, c) = amp * matern((grid.node(static_cast<std::size_t>(nb[a])) - p).norm(), cfg);
      }
    }
    const Eigen::MatrixXd half = llt.matrixL().solve(cross);
    for (Eigen::Index c = 0; c < nq; ++c) {
      const auto q = static_cast<Eigen::Index>(members[c]);
      out.mean[q] = cross.col(c).dot(weights);
      out.variance[q] = std::clamp(amp - half.col(c).squaredNorm(), 0.0, amp + cfg.jitter);
    }
  }
  return out;
}

void fuse_measurement(HeightGrid& grid, const KernelConfig& cfg, const SurfaceMeasurement& m) {
  const double radius = cfg.update_radius_factor * cfg.lengthscale;
  const Eigen::Vector2d hit = m.point.head<2>();
  const double sigma_t2 = cfg.slope_sigma * cfg.slope_sigma;
  for (int k : neighbourhood(grid, hit, radius)) {
    const double s = (grid.node(static_cast<std::size_t>(k)) - hit).norm();
    const double r = m.height_variance + sigma_t2 * std::expm1(s / cfg.lengthscale);
    if (!(r < INFINITY)) continue;  // uninformative
    double& var = grid.variances()[k];
    double& mu = grid.means()[k];
    const double gain = var / (var + r);
    mu += gain * (m.point.z() - mu);
    var = std::max(var * r / (var + r), cfg.variance_floor);
  }
}

HeightGrid update_grid(HeightGrid grid, const KernelConfig& cfg, const SurfaceMeasurement& m) {
  fuse_measurement(grid, cfg, m);
  return grid;
}

VolumeEstimate volume(const HeightGrid& grid, const KernelConfig& cfg, int refinement) {
  if (refinement < 1) throw ConfigError("volume refinement must be at least 1");
  std::vector<Eigen::Vector2d> lattice;
  double area = grid.cell_area();
  if (refinement == 1) {
    lattice.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) lattice.push_back(grid.node(k));
  } else {
    const Domain dom = grid.domain();
    const int nx = grid.n() * refinement;
    const int ny = grid.m() * refinement;
    const double dx = dom.width() / nx;
    const double dy = dom.depth() / ny;
    area = dx * dy;
    lattice.reserve(static_cast<std::size_t>(nx) * ny);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        lattice.emplace_back(dom.x_min + (i + 0.5) * dx, dom.y_min + (j + 0.5) * dy);
      }
    }
  }
  const GpPrediction pred = gp_predict(grid, cfg, lattice);
  return {area * pred.mean.sum(), area * std::sqrt(pred.variance.sum())};
}

}  // namespace pilevol
