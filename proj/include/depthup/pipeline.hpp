#pragma once

#include "depthup/config.hpp"
#include "depthup/grid.hpp"
#include "depthup/metrics.hpp"
#include "depthup/prior.hpp"
#include "depthup/solver.hpp"

#include <optional>
#include <string>

namespace depthup {

enum class Method {
  full,      // informing prior + weighted regularisers
  baseline,  // second-difference term only: gamma = 0, W1 = I
  nearest,   // nearest-sample fill
};

std::string to_string(Method m);

struct Reconstruction {
  Method method = Method::full;
  DepthGrid depth;
  std::optional<ConvergenceReport> report;  // absent for `nearest`
  std::optional<PriorBuild> prior;          // present for `full`
  double seconds = 0.0;
};

Reconstruction reconstruct(const SparseDepth& samples, const IntensityGrid& image,
                           const Config& config, Method method);

struct SyntheticFrame {
  SceneSpec scene;
  DepthGrid truth;
  IntensityGrid intensity;
  SparseDepth sparse;
};

/// Random scene from `config.scene`, sampled per `config.acquisition`.
SyntheticFrame synthesize(const Config& config);

}  // namespace depthup
