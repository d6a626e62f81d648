#include "depthup/pipeline.hpp"

#include "depthup/simulate.hpp"
#include "depthup/weights.hpp"

#include <chrono>

namespace depthup {

std::string to_string(Method m) {
  switch (m) {
    case Method::full: return "full";
    case Method::baseline: return "baseline";
    case Method::nearest: return "nearest";
  }
  return "unknown";
}

Reconstruction reconstruct(const SparseDepth& samples, const IntensityGrid& image,
                           const Config& config, Method method) {
  config.validate();
  check_same_shape(samples.shape(), image.shape(), "reconstruct");
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  switch (method) {
    case Method::nearest: {
      Reconstruction out{method, coarse_upsample(samples), std::nullopt, std::nullopt, 0.0};
      out.seconds = elapsed();
      return out;
    }
    case Method::baseline: {
      SolverConfig cfg = config.solver;
      cfg.gamma = 0.0;
      SolveResult res = solve(samples, InformingPrior::zero(samples.shape()),
                              WeightMasks::identity(samples.shape()), cfg);
      Reconstruction out{method, std::move(res.depth), std::move(res.report), std::nullopt, 0.0};
      out.seconds = elapsed();
      return out;
    }
    case Method::full: {
      PriorBuild built = build_prior_detailed(samples, image, config.prior);
      const WeightMasks weights = build_weights(built.prior, config.weight_stencil);
      SolveResult res = solve(samples, built.prior, weights, config.solver, built.coarse);
      Reconstruction out{method, std::move(res.depth), std::move(res.report), std::move(built), 0.0};
      out.seconds = elapsed();
      return out;
    }
  }
  throw std::invalid_argument("reconstruct: unknown method");
}

SyntheticFrame synthesize(const Config& config) {
  config.validate();
  SceneSpec scene = random_scene(config.scene.rows, config.scene.cols, config.scene.seed,
                                 config.scene.boxes, config.scene.stripes);
  scene.intensity_noise = config.scene.intensity_noise;
  auto [truth, intensity] = generate_scene(scene);
  SparseDepth sparse = sample_lidar(truth, config.acquisition);
  return {std::move(scene), std::move(truth), std::move(intensity), std::move(sparse)};
}

}  // namespace depthup
