#pragma once

#include "oracles.hpp"

#include "depthup/pipeline.hpp"
#include "depthup/simulate.hpp"
#include "depthup/solver.hpp"
#include "depthup/weights.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace depthup::testing {

struct LibraryProblem {
  SparseDepth samples;
  InformingPrior prior;
  WeightMasks weights;
  SolverConfig config;
};

inline LibraryProblem to_library(const Problem& p) {
  const Eigen::MatrixXd sel = p.sel.reshaped(p.rows, p.cols);
  Mask mask = sel.array() > 0.5;
  SparseDepth samples(mask, p.b.reshaped(p.rows, p.cols));
  InformingPrior prior{p.u.head(p.n()).reshaped(p.rows, p.cols),
                       p.u.tail(p.n()).reshaped(p.rows, p.cols)};
  SolverConfig cfg;
  cfg.beta = p.beta;
  cfg.gamma = p.gamma;
  return {std::move(samples), std::move(prior), {p.w1, p.w2}, cfg};
}

/// Two tilted planes meeting at a vertical depth step in the middle column,
/// with matching intensity halves.
inline std::pair<DepthGrid, IntensityGrid> two_plane_scene(Index size, double step) {
  Eigen::MatrixXd d(size, size), im(size, size);
  for (Index c = 0; c < size; ++c) {
    for (Index r = 0; r < size; ++r) {
      const bool right = c >= size / 2;
      d(r, c) = right ? 5.0 + step + 0.02 * r : 5.0 + 0.03 * c + 0.01 * r;
      im(r, c) = right ? 0.8 : 0.2;
    }
  }
  return {DepthGrid(d), IntensityGrid(im)};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("depthup_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace depthup::testing
