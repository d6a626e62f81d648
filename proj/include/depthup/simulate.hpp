#pragma once

#include "depthup/grid.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace depthup {

/// Axis-aligned pixel rectangle: top-left corner and extent.
struct Rect {
  Index row = 0;
  Index col = 0;
  Index rows = 0;
  Index cols = 0;

  bool contains(Index r, Index c) const {
    return r >= row && r < row + rows && c >= col && c < col + cols;
  }
};

/// Fronto-parallel object: constant depth and intensity over a rectangle.
struct Box {
  Rect rect;
  double depth = 10.0;
  double intensity = 0.5;
};

/// Intensity-only marking; depth underneath is unchanged.
struct Stripe {
  Rect rect;
  double intensity = 0.5;
};

/// Depth of the floor as a function of row: bottom_depth at the last row,
/// growing by gradient_per_row for every row upward, capped by the background.
struct GroundPlane {
  double bottom_depth = 6.0;
  double gradient_per_row = 0.5;
};

struct SceneSpec {
  Index rows = 128;
  Index cols = 128;
  GroundPlane ground;
  double background_depth = 40.0;
  std::vector<Box> boxes;    // drawn in order, later boxes occlude earlier ones
  std::vector<Stripe> stripes;
  double intensity_noise = 0.0;  // std of additive Gaussian intensity noise
  std::uint64_t seed = 0;

  void validate() const;
};

struct AcquisitionSpec {
  double sampling_rate = 0.0625;
  double sigma0 = 0.02;  // noise std = sigma0 + sigma1 * depth
  double sigma1 = 0.005;
  double max_range = 80.0;
  Index fov_first_row = 0;
  Index fov_last_row = -1;  // -1: last row of the image
  std::uint64_t seed = 1;

  void validate() const;
};

/// Ground-truth depth and the co-registered intensity image.
std::pair<DepthGrid, IntensityGrid> generate_scene(const SceneSpec& spec);

/// Edge-rich random layout: a floor, a far wall, `box_count` boxes drawn far to
/// near, and `stripe_count` texture stripes.
SceneSpec random_scene(Index rows, Index cols, std::uint64_t seed, int box_count = 6,
                       int stripe_count = 3);

/// Random pixel subset at `sampling_rate` inside the field of view, with
/// depth-proportional Gaussian noise. Pixels whose true depth exceeds
/// max_range are never returned.
SparseDepth sample_lidar(const DepthGrid& truth, const AcquisitionSpec& acq);

}  // namespace depthup
