#pragma once

#include "depthup/grid.hpp"
#include "depthup/metrics.hpp"
#include "depthup/prior.hpp"
#include "depthup/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace depthup::io {

namespace fs = std::filesystem;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- portable float map (grayscale "Pf", little-endian float32) -------------

Eigen::MatrixXd read_pfm(const fs::path& path);
void write_pfm(const fs::path& path, const Eigen::MatrixXd& values);

// --- 16-bit depth PNG: stored = round(depth * 256), 0 = invalid ------------

inline constexpr double kDepthPngScale = 256.0;

struct DepthPng {
  DepthGrid depth;  // 0 where invalid
  EvalMask valid;
};

DepthPng read_depth_png(const fs::path& path);
void write_depth_png(const fs::path& path, const DepthGrid& depth);

/// Dispatches on extension: .pfm (float) or .png (16-bit convention).
DepthGrid read_depth(const fs::path& path);
void write_depth(const fs::path& path, const DepthGrid& depth);

/// .pfm, or .png (8/16-bit gray, RGB or RGBA; colour is converted to luma).
IntensityGrid read_intensity(const fs::path& path);
void write_intensity(const fs::path& path, const IntensityGrid& image);

void write_mask_png(const fs::path& path, const Mask& mask);
Mask read_mask_png(const fs::path& path);

// --- sparse samples ---------------------------------------------------------
//
// Text format:
//   # comment lines start with '#'
//   <rows> <cols>
//   <row> <col> <depth_metres>     one line per sample, zero-based
//
// Depth is written with 6 significant digits. Duplicate pixels keep the last
// record and log a warning. A `.png` path uses the 16-bit depth convention.

SparseDepth read_sparse(const fs::path& path);
void write_sparse(const fs::path& path, const SparseDepth& samples);
SparseDepth parse_sparse(const std::string& text);
std::string format_sparse(const SparseDepth& samples);

// --- informing prior: <dir>/prior_row.pfm and <dir>/prior_col.pfm ----------

void write_prior(const fs::path& dir, const InformingPrior& prior);
InformingPrior read_prior(const fs::path& dir);

/// 8-bit RGB PNG, hue running red (near) to blue (far) linearly in log depth
/// between the grid's extremes. Non-positive depths are clamped to the
/// smallest positive value.
void export_colorized(const DepthGrid& depth, const fs::path& path);

/// RGB pixels of `export_colorized` without the file, row-major, 3 bytes each.
std::vector<unsigned char> colorize(const DepthGrid& depth);

// --- frames -----------------------------------------------------------------

/// A frame directory holds intensity.{pfm,png}, sparse.{txt,png} and
/// optionally truth.{pfm,png}. Pixels with truth <= 0 are excluded from
/// evaluation.
struct FrameBundle {
  std::string frame_id;
  IntensityGrid intensity;
  SparseDepth sparse;
  std::optional<DepthGrid> truth;
  std::optional<EvalMask> eval_mask;
};

FrameBundle read_frame(const fs::path& dir);

// --- JSON records -----------------------------------------------------------

nlohmann::json to_json(const ConvergenceReport& report);
nlohmann::json to_json(const ErrorMetrics& metrics);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace depthup::io
