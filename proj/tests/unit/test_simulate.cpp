#include "depthup/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace depthup {
namespace {

SceneSpec flat_spec(Index rows, Index cols) {
  SceneSpec s;
  s.rows = rows;
  s.cols = cols;
  s.ground.bottom_depth = 12.0;
  s.ground.gradient_per_row = 0.0;
  s.background_depth = 40.0;
  return s;
}

TEST(GenerateScene, FlatGroundIsConstant) {
  const auto [depth, image] = generate_scene(flat_spec(10, 14));
  EXPECT_TRUE((depth.values().array() == 12.0).all());
  EXPECT_TRUE((image.values().array() == image(0, 0)).all());
}

TEST(GenerateScene, BoxEdgesSitOnTheRectangleBorder) {
  SceneSpec s = flat_spec(20, 20);
  s.boxes.push_back({{4, 6, 5, 7}, 8.0, 0.9});
  const auto [depth, image] = generate_scene(s);
  for (Index c = 0; c < 20; ++c) {
    for (Index r = 0; r < 20; ++r) {
      const bool inside = r >= 4 && r < 9 && c >= 6 && c < 13;
      EXPECT_EQ(depth(r, c), inside ? 8.0 : 12.0);
      if (inside) {
        EXPECT_EQ(image(r, c), 0.9);
      }
    }
  }
}

TEST(GenerateScene, LaterBoxesOcclude) {
  SceneSpec s = flat_spec(10, 10);
  s.boxes.push_back({{0, 0, 6, 6}, 20.0, 0.1});
  s.boxes.push_back({{3, 3, 6, 6}, 9.0, 0.8});
  const auto [depth, image] = generate_scene(s);
  EXPECT_EQ(depth(4, 4), 9.0);
  EXPECT_EQ(depth(1, 1), 20.0);
  EXPECT_EQ(image(4, 4), 0.8);
}

TEST(GenerateScene, StripeChangesIntensityOnly) {
  SceneSpec s = flat_spec(12, 12);
  const auto [plain_depth, plain_image] = generate_scene(s);
  s.stripes.push_back({{2, 5, 8, 2}, 0.02});
  const auto [depth, image] = generate_scene(s);
  EXPECT_EQ(depth, plain_depth);
  EXPECT_EQ(image(5, 5), 0.02);
  EXPECT_EQ(image(5, 4), plain_image(5, 4));
  EXPECT_NE(image(5, 5), image(5, 4));
}

TEST(GenerateScene, GroundRisesTowardTheWall) {
  SceneSpec s = flat_spec(30, 4);
  s.ground.bottom_depth = 5.0;
  s.ground.gradient_per_row = 2.0;
  s.background_depth = 30.0;
  const auto [depth, image] = generate_scene(s);
  EXPECT_EQ(depth(29, 0), 5.0);
  EXPECT_EQ(depth(28, 0), 7.0);
  EXPECT_EQ(depth(0, 0), 30.0);
  for (Index r = 1; r < 30; ++r) EXPECT_LE(depth(r, 0), depth(r - 1, 0));
}

TEST(GenerateScene, IntensityNoiseIsSeeded) {
  SceneSpec s = flat_spec(16, 16);
  s.intensity_noise = 0.05;
  s.seed = 3;
  const auto a = generate_scene(s).second;
  const auto b = generate_scene(s).second;
  EXPECT_EQ(a, b);
  s.seed = 4;
  EXPECT_FALSE(a == generate_scene(s).second);
  EXPECT_GE(a.values().minCoeff(), 0.0);
  EXPECT_LE(a.values().maxCoeff(), 1.0);
}

TEST(GenerateScene, RejectsInvalidSpecs) {
  SceneSpec s = flat_spec(10, 10);
  s.boxes.push_back({{8, 8, 3, 1}, 5.0, 0.5});
  EXPECT_THROW(generate_scene(s), std::invalid_argument);
  s = flat_spec(10, 10);
  s.boxes.push_back({{0, 0, 2, 2}, -1.0, 0.5});
  EXPECT_THROW(generate_scene(s), std::invalid_argument);
  s = flat_spec(10, 10);
  s.stripes.push_back({{0, 0, 2, 2}, 1.5});
  EXPECT_THROW(generate_scene(s), std::invalid_argument);
  s = flat_spec(10, 10);
  s.background_depth = 0.0;
  EXPECT_THROW(generate_scene(s), std::invalid_argument);
  s = flat_spec(1, 10);
  EXPECT_THROW(generate_scene(s), std::invalid_argument);
}

TEST(RandomScene, IsSeededAndValid) {
  const SceneSpec a = random_scene(96, 128, 17);
  const SceneSpec b = random_scene(96, 128, 17);
  EXPECT_NO_THROW(a.validate());
  EXPECT_EQ(a.boxes.size(), 6u);
  EXPECT_EQ(a.stripes.size(), 3u);
  EXPECT_EQ(generate_scene(a).first, generate_scene(b).first);
  EXPECT_FALSE(generate_scene(a).first == generate_scene(random_scene(96, 128, 18)).first);
  const DepthGrid d = generate_scene(a).first;
  EXPECT_GT(d.values().minCoeff(), 0.0);
  EXPECT_LT(d.values().maxCoeff(), AcquisitionSpec{}.max_range);
}

TEST(SampleLidar, NoiselessRateMatchesBinomial) {
  const DepthGrid truth = generate_scene(random_scene(128, 128, 5)).first;
  AcquisitionSpec acq;
  acq.sigma0 = acq.sigma1 = 0.0;
  acq.seed = 9;
  const SparseDepth s = sample_lidar(truth, acq);
  const double n = 128.0 * 128.0, p = 0.0625;
  const double sd = std::sqrt(n * p * (1.0 - p));
  EXPECT_NEAR(static_cast<double>(s.sample_count()), n * p, 4.0 * sd);
  for (Index i = 0; i < s.mask().size(); ++i)
    if (s.mask()(i)) {
      EXPECT_EQ(s.values()(i), truth.values()(i));
    }
}

TEST(SampleLidar, NoiseStdGrowsAffinelyWithDepth) {
  // 10 depth levels of 10^4 pixels each, all sampled.
  const Index rows = 10, cols = 10000;
  Eigen::MatrixXd d(rows, cols);
  for (Index r = 0; r < rows; ++r) d.row(r).setConstant(5.0 + 5.0 * static_cast<double>(r));
  AcquisitionSpec acq;
  acq.sampling_rate = 1.0;
  acq.sigma0 = 0.02;
  acq.sigma1 = 0.01;
  acq.seed = 77;
  const SparseDepth s = sample_lidar(DepthGrid(d), acq);
  ASSERT_EQ(s.sample_count(), rows * cols);

  Eigen::VectorXd depth(rows), sd(rows);
  for (Index r = 0; r < rows; ++r) {
    const Eigen::ArrayXd err = (s.values().row(r) - d.row(r)).transpose().array();
    depth(r) = d(r, 0);
    sd(r) = std::sqrt((err - err.mean()).square().mean());
  }
  const double dm = depth.mean(), sm = sd.mean();
  const double slope = (depth.array() - dm).matrix().dot((sd.array() - sm).matrix()) /
                       (depth.array() - dm).square().sum();
  EXPECT_NEAR(slope, acq.sigma1, 0.1 * acq.sigma1);
  EXPECT_NEAR(sm - slope * dm, acq.sigma0, 0.02);
}

TEST(SampleLidar, RespectsFieldOfViewAndRange) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(40, 40, 10.0);
  d.block(0, 0, 40, 10).setConstant(90.0);
  AcquisitionSpec acq;
  acq.sampling_rate = 0.5;
  acq.fov_first_row = 10;
  acq.fov_last_row = 29;
  const SparseDepth s = sample_lidar(DepthGrid(d), acq);
  ASSERT_GT(s.sample_count(), 0);
  for (Index c = 0; c < 40; ++c) {
    for (Index r = 0; r < 40; ++r) {
      if (!s.mask()(r, c)) continue;
      EXPECT_GE(r, 10);
      EXPECT_LE(r, 29);
      EXPECT_LE(d(r, c), acq.max_range);
    }
  }
}

TEST(SampleLidar, ClampsNegativeValuesAtZero) {
  AcquisitionSpec acq;
  acq.sampling_rate = 1.0;
  acq.sigma0 = 5.0;
  const SparseDepth s = sample_lidar(DepthGrid(20, 20, 0.5), acq);
  EXPECT_EQ(s.values().minCoeff(), 0.0);
}

TEST(SampleLidar, IsDeterministic) {
  const DepthGrid truth = generate_scene(random_scene(64, 64, 2)).first;
  AcquisitionSpec acq;
  acq.seed = 5;
  EXPECT_EQ(sample_lidar(truth, acq), sample_lidar(truth, acq));
  AcquisitionSpec other = acq;
  other.seed = 6;
  EXPECT_FALSE(sample_lidar(truth, acq) == sample_lidar(truth, other));
}

TEST(SampleLidar, Errors) {
  const DepthGrid truth(10, 10, 50.0);
  AcquisitionSpec acq;
  acq.max_range = 40.0;
  EXPECT_THROW(sample_lidar(truth, acq), std::runtime_error);
  for (const double rate : {0.0, -0.1, 1.5}) {
    AcquisitionSpec bad;
    bad.sampling_rate = rate;
    EXPECT_THROW(sample_lidar(truth, bad), std::invalid_argument);
  }
  AcquisitionSpec bad;
  bad.sigma1 = -0.1;
  EXPECT_THROW(sample_lidar(truth, bad), std::invalid_argument);
  bad = {};
  bad.fov_first_row = 5;
  bad.fov_last_row = 4;
  EXPECT_THROW(sample_lidar(truth, bad), std::invalid_argument);
}

}  // namespace
}  // namespace depthup
