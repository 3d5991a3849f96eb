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
#include <random>

#include "oracles.hpp"
#include "pilevol/localization.hpp"
#include "pilevol/terrain.hpp"

namespace pilevol {
namespace {

// 12-feature wall at x = 30, like the default layout.
FeatureMap wall() { return feature_wall(30.0, 1.0, 19.0, 4, 2.0, 10.0, 3); }

Pose hover(double x, double y, double z = 7.0, double yaw = 0.0) {
  Pose p;
  p.position = {x, y, z};
  p.yaw = yaw;
  return p;
}

Pose perturbed(const Pose& p, double dp, double da) {
  Pose q = p;
  q.position += Eigen::Vector3d(dp, -dp, 0.5 * dp);
  q.roll += da;
  q.pitch -= 0.5 * da;
  q.yaw += da;
  return q;
}

TEST(FeatureMap, RejectsDuplicateIds) {
  FeatureMap m;
  m.add({1, {0, 0, 0}});
  EXPECT_THROW(m.add({1, {1, 1, 1}}), ConfigError);
  EXPECT_TRUE(m.find(1).has_value());
  EXPECT_FALSE(m.find(2).has_value());
}

TEST(SimulateDetections, AllBehindCameraIsEmpty) {
  CameraModel cam;
  cam.pixel_sigma = 0;
  // camera looks along +x; features all at negative x
  const FeatureMap m = feature_wall(-30.0, 0, 10, 3, 0, 10, 3);
  EXPECT_TRUE(simulate_detections(hover(0, 5), m, cam, 1).empty());
}

TEST(SimulateDetections, FeatureOnOpticalAxis) {
  CameraModel cam;
  cam.pixel_sigma = 0;
  FeatureMap m;
  m.add({42, {20, 5, 7}});
  const auto d = simulate_detections(hover(0, 5), m, cam, 1);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].id, 42);
  EXPECT_NEAR(d[0].pixel.x(), cam.cx, 1e-9);
  EXPECT_NEAR(d[0].pixel.y(), cam.cy, 1e-9);
}

TEST(SimulateDetections, DeterministicPerSeed) {
  const CameraModel cam;
  const auto a = simulate_detections(hover(10, 10), wall(), cam, 99);
  const auto b = simulate_detections(hover(10, 10), wall(), cam, 99);
  const auto c = simulate_detections(hover(10, 10), wall(), cam, 100);
  ASSERT_EQ(a.size(), b.size());
  ASSERT_EQ(a.size(), c.size());
  bool differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].id, b[k].id);
    EXPECT_EQ(a[k].pixel, b[k].pixel);
    differs = differs || a[k].pixel != c[k].pixel;
  }
  EXPECT_TRUE(differs);
}

TEST(SimulateDetections, NoiseHasConfiguredSigma) {
  CameraModel cam;
  cam.pixel_sigma = 2.0;
  CameraModel clean = cam;
  clean.pixel_sigma = 0.0;
  const Pose p = hover(10, 10);
  const auto truth = simulate_detections(p, wall(), clean, 0);
  double sum2 = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto d = simulate_detections(p, wall(), cam, seed);
    for (std::size_t k = 0; k < d.size(); ++k) {
      sum2 += (d[k].pixel - truth[k].pixel).squaredNorm();
      count += 2;
    }
  }
  EXPECT_NEAR(std::sqrt(sum2 / count), 2.0, 0.05);
}

TEST(EstimatePose, RecoversNoiseFreePose) {
  CameraModel cam;
  cam.pixel_sigma = 0;
  Pose truth = hover(8, 11, 6.5, 0.15);
  truth.roll = 0.02;
  truth.pitch = -0.03;
  const auto d = simulate_detections(truth, wall(), cam, 0);
  cam.pixel_sigma = 1.0;
  const PoseEstimate est = estimate_pose(d, wall(), cam, perturbed(truth, 0.5, 0.1));
  EXPECT_LT((est.pose.position - truth.position).norm(), 1e-6);
  EXPECT_LT(std::abs(est.pose.roll - truth.roll), 1e-6);
  EXPECT_LT(std::abs(est.pose.pitch - truth.pitch), 1e-6);
  EXPECT_LT(std::abs(wrap_pi(est.pose.yaw - truth.yaw)), 1e-6);
  EXPECT_LE(est.final_cost, est.initial_cost);
}

TEST(EstimatePose, ResidualNeverIncreases) {
  const CameraModel cam;
  const Pose truth = hover(5, 4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = simulate_detections(truth, wall(), cam, seed);
    const PoseEstimate est = estimate_pose(d, wall(), cam, perturbed(truth, 0.3, 0.05));
    EXPECT_LE(est.final_cost, est.initial_cost);
    EXPECT_TRUE(est.covariance.is_symmetric());
    EXPECT_TRUE(est.covariance.is_psd());
  }
}

TEST(EstimatePose, CollinearFeaturesAreSingular) {
  CameraModel cam;
  cam.pixel_sigma = 0;
  FeatureMap line;
  for (int k = 0; k < 6; ++k) line.add({k, {30, 2.0 + 3 * k, 7}});
  const Pose truth = hover(10, 10);
  const auto d = simulate_detections(truth, line, cam, 0);
  ASSERT_GE(d.size(), 4u);
  EXPECT_THROW(estimate_pose(d, line, cam, truth), SingularGeometry);
  EXPECT_THROW(predicted_covariance(truth, line, cam), SingularGeometry);
}

TEST(EstimatePose, TooFewDetections) {
  const CameraModel cam;
  auto d = simulate_detections(hover(10, 10), wall(), cam, 0);
  d.resize(3);
  EXPECT_THROW(estimate_pose(d, wall(), cam, hover(10, 10)), InsufficientDetections);
}

TEST(EstimatePose, UnknownFeatureId) {
  const CameraModel cam;
  auto d = simulate_detections(hover(10, 10), wall(), cam, 0);
  d[0].id = 999;
  EXPECT_THROW(estimate_pose(d, wall(), cam, hover(10, 10)), ConfigError);
}

TEST(EstimatePose, MonteCarloMatchesPredictedCovariance) {
  const CameraModel cam;
  const Pose truth = hover(12, 8);
  const PoseCovariance predicted = predicted_covariance(truth, wall(), cam);
  const int n = 2000;
  Eigen::MatrixXd samples(n, 6);
  for (int k = 0; k < n; ++k) {
    const auto d = simulate_detections(truth, wall(), cam, 1000 + k);
    const PoseEstimate est = estimate_pose(d, wall(), cam, truth);
    Vector6d e = est.pose.as_vector() - truth.as_vector();
    for (int a = 3; a < 6; ++a) e[a] = wrap_pi(e[a]);
    samples.row(k) = e.transpose();
  }
  const Eigen::MatrixXd mc = oracle::sample_covariance(samples);
  EXPECT_NEAR(mc.trace() / predicted.trace(), 1.0, 0.15);
  for (int a = 0; a < 6; ++a) EXPECT_NEAR(mc(a, a) / predicted.matrix(a, a), 1.0, 0.2) << a;
}

TEST(QualityOfFix, IdentityAndSingleEntry) {
  PoseCovariance c;
  c.matrix = Matrix6d::Identity();
  EXPECT_NEAR(quality_of_fix(c), 1.0 / std::sqrt(6.0), 1e-15);
  c.matrix = Matrix6d::Zero();
  c.matrix(0, 0) = 4.0;
  EXPECT_DOUBLE_EQ(quality_of_fix(c), 0.5);
}

TEST(QualityOfFix, ZeroTraceIsInvalid) {
  EXPECT_THROW(quality_of_fix(PoseCovariance{}), InvalidCovariance);
}

TEST(QualityOfFix, TraceWeights) {
  PoseCovariance c;
  c.matrix = Matrix6d::Identity();
  Vector6d w;
  w << 1, 1, 1, 0, 0, 0;
  EXPECT_NEAR(quality_of_fix(c, w), 1.0 / std::sqrt(3.0), 1e-15);
}

TEST(QualityOfFix, FartherFromWallIsWorse) {
  const CameraModel cam;
  const double near = quality_of_fix(predicted_covariance(hover(18, 10), wall(), cam));
  const double far = quality_of_fix(predicted_covariance(hover(2, 10), wall(), cam));
  EXPECT_GT(near, far);
}

TEST(PredictedCovariance, ScalesWithPixelVariance) {
  CameraModel cam;
  const Pose p = hover(9, 12);
  const Matrix6d one = predicted_covariance(p, wall(), cam).matrix;
  cam.pixel_sigma = 2.0;
  const Matrix6d two = predicted_covariance(p, wall(), cam).matrix;
  EXPECT_LT((two - 4.0 * one).norm(), 1e-12 * two.norm());
}

TEST(PredictedCovariance, DuplicatedFeaturesHalveIt) {
  const CameraModel cam;
  const Pose p = hover(9, 12);
  FeatureMap twice = wall();
  const FeatureMap base = wall();
  for (const auto& f : base.features()) twice.add({f.id + 1000, f.position});
  const Matrix6d one = predicted_covariance(p, wall(), cam).matrix;
  const Matrix6d half = predicted_covariance(p, twice, cam).matrix;
  EXPECT_LT((2.0 * half - one).norm(), 1e-9 * one.norm());
}

TEST(PredictedCovariance, InsufficientVisibility) {
  const CameraModel cam;
  EXPECT_THROW(predicted_covariance(hover(10, 10, 7, 3.14159), wall(), cam), InsufficientDetections);
}

TEST(PredictedCovariance, SymmetricPsdOverALattice) {
  const CameraModel cam;
  for (double x = 0; x <= 20; x += 2.5) {
    for (double y = 0; y <= 20; y += 2.5) {
      const PoseCovariance c = predicted_covariance(hover(x, y), wall(), cam);
      EXPECT_TRUE(c.is_symmetric());
      EXPECT_TRUE(c.is_psd());
    }
  }
}

TEST(PredictedCovariance, TranslationInvariance) {
  const CameraModel cam;
  const Eigen::Vector3d shift(-7.5, 40.0, 3.0);
  FeatureMap moved;
  const FeatureMap base = wall();
  for (const auto& f : base.features()) moved.add({f.id, f.position + shift});
  Pose p = hover(6, 13);
  const double q0 = quality_of_fix(predicted_covariance(p, wall(), cam));
  p.position += shift;
  const double q1 = quality_of_fix(predicted_covariance(p, moved, cam));
  EXPECT_NEAR(q0, q1, 1e-9 * q0);
}

TEST(PredictedCovariance, AddingVisibleFeatureNeverLowersQuality) {
  const CameraModel cam;
  const Pose p = hover(10, 10);
  FeatureMap m = wall();
  double q = quality_of_fix(predicted_covariance(p, m, cam));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> y(3, 17), z(3, 11);
  for (int k = 0; k < 10; ++k) {
    m.add({500 + k, {30, y(rng), z(rng)}});
    const double next = quality_of_fix(predicted_covariance(p, m, cam));
    EXPECT_GE(next, q * (1 - 1e-12));
    q = next;
  }
}

TEST(InCfree, BoundsAndThreshold) {
  const CameraModel cam;
  FeasibilityConfig cfg;
  cfg.bounds.min = {0, 0, 0};
  cfg.bounds.max = {20, 20, 12};
  cfg.tau = 1e-9;
  EXPECT_TRUE(in_cfree(hover(10, 10), wall(), cam, cfg));
  EXPECT_FALSE(in_cfree(hover(-1, 10), wall(), cam, cfg));
  EXPECT_FALSE(in_cfree(hover(10, 10, 13), wall(), cam, cfg));
  cfg.tau = 0.0;
  EXPECT_TRUE(in_cfree(hover(10, 10), wall(), cam, cfg));
  cfg.tau = 1e9;
  EXPECT_FALSE(in_cfree(hover(10, 10), wall(), cam, cfg));
  cfg.tau = 0.1;
  cfg.min_features = 13;
  EXPECT_FALSE(in_cfree(hover(10, 10), wall(), cam, cfg));
}

TEST(InCfree, YawRange) {
  const CameraModel cam;
  FeasibilityConfig cfg;
  cfg.tau = 0.1;
  cfg.bounds.yaw_min = 0.0;
  cfg.bounds.yaw_max = 0.5;
  EXPECT_TRUE(in_cfree(hover(10, 10, 7, 0.2), wall(), cam, cfg));
  EXPECT_FALSE(in_cfree(hover(10, 10, 7, -0.2), wall(), cam, cfg));
}

TEST(FeasibilityConfig, Validation) {
  FeasibilityConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.tau = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.tau = 1;
  cfg.min_features = 2;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(QualityMap, EmptyMapIsAllSentinel) {
  const QualityField f = quality_map(FeatureMap{}, CameraModel{}, 7, 0, {0, 20, 5, 0, 20, 5});
  ASSERT_EQ(f.values.size(), 25u);
  for (const auto& v : f.values) EXPECT_FALSE(v.has_value());
}

TEST(QualityMap, MatchesPointwiseQuality) {
  const CameraModel cam;
  const LatticeSpec lat{0, 20, 9, 0, 20, 7};
  const QualityField f = quality_map(wall(), cam, 7, 0, lat, 4, 3);
  for (int j = 0; j < lat.ny; ++j) {
    for (int i = 0; i < lat.nx; ++i) {
      ASSERT_TRUE(f.at(i, j).has_value());
      const double q = quality_of_fix(predicted_covariance(hover(lat.x(i), lat.y(j)), wall(), cam));
      EXPECT_EQ(*f.at(i, j), q);
    }
  }
}

TEST(QualityMap, SingleMarkerPeaksAtMidRange) {
  // One square marker (four corner points) on the wall, viewed head-on.
  FeatureMap marker;
  marker.add({0, {30, 9.5, 6.5}});
  marker.add({1, {30, 10.5, 6.5}});
  marker.add({2, {30, 10.5, 7.5}});
  marker.add({3, {30, 9.5, 7.5}});
  const CameraModel cam;
  const LatticeSpec lat{0, 29.5, 119, 10, 10, 1};
  const QualityField f = quality_map(marker, cam, 7, 0, lat);
  int peak = -1;
  double best = 0.0;
  for (int i = 0; i < lat.nx; ++i) {
    if (f.at(i, 0) && *f.at(i, 0) > best) {
      best = *f.at(i, 0);
      peak = i;
    }
  }
  ASSERT_GE(peak, 0);
  // Too close the marker leaves the image; the peak is somewhere in between.
  EXPECT_LT(peak, lat.nx - 1);
  // Monotone decay moving away from the marker beyond the peak.
  for (int i = peak; i > 0; --i) {
    ASSERT_TRUE(f.at(i - 1, 0).has_value());
    EXPECT_LE(*f.at(i - 1, 0), *f.at(i, 0));
  }
}

TEST(QualityMap, WorstFarFromWallAndSymmetric) {
  // The wall spans y in [1, 19], so the field is mirror-symmetric about y = 10.
  const CameraModel cam;
  const LatticeSpec lat{0, 20, 21, 0, 20, 21};
  const QualityField f = quality_map(wall(), cam, 6, 0, lat);
  for (int j = 0; j < lat.ny; ++j) {
    double row_min = INFINITY;
    int arg = -1;
    for (int i = 0; i < lat.nx; ++i) {
      ASSERT_TRUE(f.at(i, j).has_value());
      const double q = *f.at(i, j);
      const double mirror = *f.at(i, lat.ny - 1 - j);
      EXPECT_NEAR(q, mirror, 1e-6 * q);
      if (q < row_min) {
        row_min = q;
        arg = i;
      }
    }
    EXPECT_EQ(arg, 0) << "row " << j;
  }
}

}  // namespace
}  // namespace pilevol
