#pragma once

#include "depthup/prior.hpp"
#include "depthup/simulate.hpp"
#include "depthup/solver.hpp"
#include "depthup/weights.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace depthup {

/// Parameters of the random synthetic scene used by `synth`.
struct SceneConfig {
  Index rows = 128;
  Index cols = 128;
  std::uint64_t seed = 7;
  int boxes = 6;
  int stripes = 3;
  double intensity_noise = 0.0;
};

/// Every tunable of the pipeline. On disk it is plain text, one
/// `section.key = value` per line, `#` starting a comment.
struct Config {
  SolverConfig solver;
  PriorParams prior;
  WeightStencil weight_stencil = WeightStencil::aligned;
  AcquisitionSpec acquisition;
  SceneConfig scene;

  /// Known keys in canonical order.
  static const std::vector<std::string>& keys();

  /// "synthia" (beta 0.005, gamma 0.001, window 5) or "kitti" (beta 0.01,
  /// gamma 0.002, window 5).
  static Config preset(const std::string& name);

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  /// Applies every `key = value` line of `text`; unknown keys are errors.
  void merge_text(const std::string& text);
  std::string to_text() const;
  nlohmann::json to_json() const;

  void validate() const;
};

Config load_config(const std::filesystem::path& path);

}  // namespace depthup
