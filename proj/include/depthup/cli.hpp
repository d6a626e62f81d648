#pragma once

#include "depthup/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace depthup::cli {

namespace fs = std::filesystem;

/// Each command writes into `out` and returns the run manifest it wrote
/// (`out/manifest.json`). Manifests hold no timings, so identical inputs give
/// byte-identical manifests; wall-clock times go to `out/timings.json`.

nlohmann::json cmd_synth(const Config& config, const fs::path& out);
nlohmann::json cmd_prior(const fs::path& frame, const Config& config, const fs::path& out);
nlohmann::json cmd_upsample(const fs::path& frame, const Config& config, bool baseline,
                            const fs::path& out);

struct EvalInput {
  std::string frame_id;
  fs::path reconstruction;
  fs::path truth;
  std::optional<fs::path> mask;  // defaults to truth > 0
};

/// One row per input plus a trailing "mean" row (arithmetic mean over frames).
nlohmann::json cmd_eval(const std::vector<EvalInput>& inputs, const fs::path& out);

/// Frames under `dir`: each subdirectory with depth.pfm and truth.{pfm,png}.
std::vector<EvalInput> collect_eval_batch(const fs::path& dir);

/// Runs full, baseline and nearest-sample fill on one frame; the table marks
/// the best MAE and RMSE with '*'.
nlohmann::json cmd_compare(const fs::path& frame, const Config& config, const fs::path& out);

std::string format_compare_table(const nlohmann::json& manifest);

/// Entry point: subcommands synth, prior, upsample, eval, compare. Returns
/// the process exit code.
int run(int argc, const char* const* argv);

}  // namespace depthup::cli
