#include "depthup/config.hpp"

#include "depthup/io.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

namespace depthup {
namespace {

TEST(Config, DefaultsAreValid) {
  const Config c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.solver.beta, 0.005);
  EXPECT_EQ(c.solver.gamma, 0.001);
  EXPECT_EQ(c.prior.window, 5);
  EXPECT_EQ(c.acquisition.sampling_rate, 0.0625);
  EXPECT_EQ(c.weight_stencil, WeightStencil::aligned);
}

TEST(Config, Presets) {
  const Config s = Config::preset("synthia");
  EXPECT_EQ(s.solver.beta, 0.005);
  EXPECT_EQ(s.solver.gamma, 0.001);
  EXPECT_EQ(s.prior.window, 5);
  const Config k = Config::preset("kitti");
  EXPECT_EQ(k.solver.beta, 0.01);
  EXPECT_EQ(k.solver.gamma, 0.002);
  EXPECT_EQ(k.prior.window, 5);
  EXPECT_THROW(Config::preset("middlebury"), std::invalid_argument);
}

TEST(Config, MergeTextSetsEverySection) {
  Config c;
  c.merge_text(
      "# tuning\n"
      "solver.beta = 0.02\n"
      "  solver.rho=0.5   # inline comment\n"
      "\n"
      "prior.window = 3\n"
      "prior.weight_stencil = printed\n"
      "canny.sigma = 1.5\n"
      "acquisition.sampling_rate = 0.0156\n"
      "acquisition.seed = 12345678901234\n"
      "scene.rows = 64\n");
  EXPECT_EQ(c.solver.beta, 0.02);
  EXPECT_EQ(c.solver.rho, 0.5);
  EXPECT_EQ(c.prior.window, 3);
  EXPECT_EQ(c.weight_stencil, WeightStencil::printed);
  EXPECT_EQ(c.prior.canny.gaussian_sigma, 1.5);
  EXPECT_EQ(c.acquisition.sampling_rate, 0.0156);
  EXPECT_EQ(c.acquisition.seed, 12345678901234u);
  EXPECT_EQ(c.scene.rows, 64);
  EXPECT_EQ(c.solver.gamma, 0.001);  // untouched keys keep defaults
}

TEST(Config, TextRoundTripIsExact) {
  Config c;
  c.solver.beta = 0.1 + 0.2;  // not exactly representable in short decimal
  c.solver.tol_primal = 3e-7;
  c.prior.jump_threshold = 1.0 / 3.0;
  c.acquisition.fov_last_row = 90;
  c.weight_stencil = WeightStencil::printed;
  Config back;
  back.merge_text(c.to_text());
  EXPECT_EQ(back.to_text(), c.to_text());
  EXPECT_EQ(back.solver.beta, c.solver.beta);
  EXPECT_EQ(back.prior.jump_threshold, c.prior.jump_threshold);
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(Config, KeysCoverEveryTunable) {
  const auto& keys = Config::keys();
  for (const char* k : {"solver.beta", "solver.gamma", "solver.rho", "solver.max_iters",
                        "solver.tol_primal", "solver.tol_dual", "prior.window", "prior.jump_threshold",
                        "canny.sigma", "canny.low", "canny.high", "acquisition.sampling_rate",
                        "acquisition.sigma0", "acquisition.sigma1", "acquisition.max_range",
                        "acquisition.seed", "scene.seed"}) {
    EXPECT_NE(std::find(keys.begin(), keys.end(), k), keys.end()) << k;
  }
  Config c;
  for (const std::string& k : keys) EXPECT_NO_THROW(c.set(k, c.get(k))) << k;
}

TEST(Config, Errors) {
  Config c;
  EXPECT_THROW(c.set("solver.betta", "1"), std::invalid_argument);
  EXPECT_THROW(c.set("solver.beta", "abc"), std::invalid_argument);
  EXPECT_THROW(c.set("solver.beta", "0.1x"), std::invalid_argument);
  EXPECT_THROW(c.set("solver.max_iters", "2.5"), std::invalid_argument);
  EXPECT_THROW(c.set("prior.weight_stencil", "diagonal"), std::invalid_argument);
  EXPECT_THROW(c.merge_text("solver.beta 0.1\n"), std::invalid_argument);
  EXPECT_THROW(c.get("nope"), std::invalid_argument);

  c = {};
  c.set("solver.rho", "0");
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.set("canny.low", "0.5");
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.set("acquisition.sampling_rate", "2");
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.set("scene.rows", "1");
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.set("scene.boxes", "-1");
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, LoadFromFile) {
  testing::TempDir dir("config");
  io::write_text(dir / "a.cfg", "solver.gamma = 0.004\n");
  EXPECT_EQ(load_config(dir / "a.cfg").solver.gamma, 0.004);
  EXPECT_THROW(load_config(dir / "missing.cfg"), std::exception);
}

}  // namespace
}  // namespace depthup
