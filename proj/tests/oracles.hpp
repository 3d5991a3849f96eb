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

// Independent reference implementations used only by tests.  None of these
// call into the library code they check.

#ifndef PILEVOL_TESTS_ORACLES_HPP
#define PILEVOL_TESTS_ORACLES_HPP

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "pilevol/surface_model.hpp"

namespace pilevol::oracle {

/// Matern correlation straight from the Bessel-function definition (Boost.Math).
inline double matern(double s, double nu, double l) {
  if (s == 0.0) return 1.0;
  const double x = std::sqrt(2.0 * nu) * s / l;
  return std::pow(2.0, 1.0 - nu) / boost::math::tgamma(nu) * std::pow(x, nu) *
         boost::math::cyl_bessel_k(nu, x);
}

struct DensePrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// Full-matrix GP over every inducing node, untruncated kernel, one global solve.
inline DensePrediction dense_gp(const HeightGrid& grid, double nu, double l, double amplitude,
                                double jitter, const std::vector<Eigen::Vector2d>& queries) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd kxx(n, n);
  Eigen::VectorXd z(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    z[a] = grid.mean(static_cast<std::size_t>(a));
    for (Eigen::Index b = 0; b < n; ++b) {
      const double s = (grid.node(static_cast<std::size_t>(a)) - grid.node(static_cast<std::size_t>(b))).norm();
      kxx(a, b) = amplitude * matern(s, nu, l);
    }
    kxx(a, a) += grid.variance(static_cast<std::size_t>(a)) + jitter;
  }
  const Eigen::MatrixXd inv = kxx.inverse();
  DensePrediction out;
  out.mean.resize(static_cast<Eigen::Index>(queries.size()));
  out.variance.resize(static_cast<Eigen::Index>(queries.size()));
  for (std::size_t q = 0; q < queries.size(); ++q) {
    Eigen::VectorXd k(n);
    for (Eigen::Index a = 0; a < n; ++a) {
      k[a] = amplitude * matern((grid.node(static_cast<std::size_t>(a)) - queries[q]).norm(), nu, l);
    }
    out.mean[static_cast<Eigen::Index>(q)] = k.dot(inv * z);
    out.variance[static_cast<Eigen::Index>(q)] = amplitude - k.dot(inv * k);
  }
  return out;
}

/// Sample covariance (unbiased) of row samples.
inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& samples) {
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centred = samples.rowwise() - mean;
  return centred.transpose() * centred / static_cast<double>(samples.rows() - 1);
}

/// Draws from N(0, cov) via an eigendecomposition, so singular covariances are fine.
class GaussianSampler {
 public:
  GaussianSampler(const Eigen::MatrixXd& cov, std::uint64_t seed) : rng_(seed) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    factor_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  Eigen::VectorXd operator()() {
    Eigen::VectorXd u(factor_.cols());
    for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = normal_(rng_);
    return factor_ * u;
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  Eigen::MatrixXd factor_;
};

}  // namespace pilevol::oracle

#endif  // PILEVOL_TESTS_ORACLES_HPP
