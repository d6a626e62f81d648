#include "depthup/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace depthup {
namespace {

void check_rect(const Rect& rc, const SceneSpec& spec, const char* what) {
  if (rc.rows < 1 || rc.cols < 1 || rc.row < 0 || rc.col < 0 || rc.row + rc.rows > spec.rows ||
      rc.col + rc.cols > spec.cols) {
    throw std::invalid_argument(std::string("scene: ") + what + " rectangle out of bounds");
  }
}

void check_intensity(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("scene: intensity must lie in [0, 1]");
}

}  // namespace

void SceneSpec::validate() const {
  check_shape({rows, cols});
  if (!(background_depth > 0.0)) throw std::invalid_argument("scene: background_depth must be > 0");
  if (!(ground.bottom_depth > 0.0)) throw std::invalid_argument("scene: ground depth must be > 0");
  if (!(ground.gradient_per_row >= 0.0)) throw std::invalid_argument("scene: ground gradient must be >= 0");
  if (!(intensity_noise >= 0.0)) throw std::invalid_argument("scene: intensity_noise must be >= 0");
  for (const Box& b : boxes) {
    check_rect(b.rect, *this, "box");
    if (!(b.depth > 0.0)) throw std::invalid_argument("scene: box depth must be > 0");
    check_intensity(b.intensity);
  }
  for (const Stripe& s : stripes) {
    check_rect(s.rect, *this, "stripe");
    check_intensity(s.intensity);
  }
}

void AcquisitionSpec::validate() const {
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
    throw std::invalid_argument("acquisition: sampling_rate must lie in (0, 1]");
  }
  if (!(sigma0 >= 0.0) || !(sigma1 >= 0.0)) throw std::invalid_argument("acquisition: sigma must be >= 0");
  if (!(max_range > 0.0)) throw std::invalid_argument("acquisition: max_range must be > 0");
  if (fov_first_row < 0) throw std::invalid_argument("acquisition: fov_first_row must be >= 0");
  if (fov_last_row >= 0 && fov_last_row < fov_first_row) {
    throw std::invalid_argument("acquisition: empty field of view");
  }
}

std::pair<DepthGrid, IntensityGrid> generate_scene(const SceneSpec& spec) {
  spec.validate();
  const Index m = spec.rows, n = spec.cols;
  Eigen::MatrixXd depth(m, n), intensity(m, n);

  // Floor shading darkens with distance, so a flat floor is uniformly lit.
  const double floor_span = std::max(spec.background_depth - spec.ground.bottom_depth, 1e-12);
  for (Index r = 0; r < m; ++r) {
    const double floor = spec.ground.bottom_depth +
                         spec.ground.gradient_per_row * static_cast<double>(m - 1 - r);
    const bool on_floor = floor < spec.background_depth;
    const double shade = on_floor ? 0.45 - 0.15 * (floor - spec.ground.bottom_depth) / floor_span : 0.75;
    depth.row(r).setConstant(std::min(floor, spec.background_depth));
    intensity.row(r).setConstant(shade);
  }
  for (const Box& b : spec.boxes) {
    depth.block(b.rect.row, b.rect.col, b.rect.rows, b.rect.cols).setConstant(b.depth);
    intensity.block(b.rect.row, b.rect.col, b.rect.rows, b.rect.cols).setConstant(b.intensity);
  }
  for (const Stripe& s : spec.stripes) {
    intensity.block(s.rect.row, s.rect.col, s.rect.rows, s.rect.cols).setConstant(s.intensity);
  }
  if (spec.intensity_noise > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.intensity_noise);
    for (Index i = 0; i < intensity.size(); ++i) {
      intensity(i) = std::clamp(intensity(i) + noise(rng), 0.0, 1.0);
    }
  }
  return {DepthGrid(std::move(depth)), IntensityGrid(std::move(intensity))};
}

SceneSpec random_scene(Index rows, Index cols, std::uint64_t seed, int box_count, int stripe_count) {
  SceneSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.seed = seed;
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto uniform_index = [&](Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, std::max(lo, hi))(rng);
  };

  spec.ground.bottom_depth = uniform(4.0, 8.0);
  spec.background_depth = uniform(35.0, 50.0);
  // Floor reaches the wall around mid-image.
  const double horizon = uniform(0.35, 0.55) * static_cast<double>(rows);
  spec.ground.gradient_per_row =
      (spec.background_depth - spec.ground.bottom_depth) / (static_cast<double>(rows) - horizon);

  // Palette keeps boxes distinguishable from the floor and wall shading.
  const double palette[] = {0.05, 0.15, 0.55, 0.9, 1.0, 0.6, 0.1, 0.95};
  for (int i = 0; i < box_count; ++i) {
    Box b;
    b.rect.rows = uniform_index(rows / 8, rows / 3);
    b.rect.cols = uniform_index(cols / 10, cols / 3);
    b.rect.row = uniform_index(rows / 6, rows - b.rect.rows);
    b.rect.col = uniform_index(0, cols - b.rect.cols);
    b.depth = uniform(8.0, 30.0);
    b.intensity = palette[uniform_index(0, 7)];
    spec.boxes.push_back(b);
  }
  std::sort(spec.boxes.begin(), spec.boxes.end(),
            [](const Box& a, const Box& b) { return a.depth > b.depth; });

  for (int i = 0; i < stripe_count; ++i) {
    Stripe s;
    if (i % 2 == 0) {  // horizontal band across part of the floor
      s.rect.rows = uniform_index(2, 4);
      s.rect.cols = uniform_index(cols / 4, cols / 2);
      s.rect.row = uniform_index(rows * 3 / 4, rows - s.rect.rows);
      s.rect.col = uniform_index(0, cols - s.rect.cols);
    } else {  // vertical band on the wall
      s.rect.rows = uniform_index(rows / 8, rows / 4);
      s.rect.cols = uniform_index(2, 4);
      s.rect.row = uniform_index(0, rows / 4);
      s.rect.col = uniform_index(0, cols - s.rect.cols);
    }
    s.intensity = uniform(0.0, 1.0) < 0.5 ? 0.05 : 0.98;
    spec.stripes.push_back(s);
  }
  return spec;
}

SparseDepth sample_lidar(const DepthGrid& truth, const AcquisitionSpec& acq) {
  acq.validate();
  const Index m = truth.rows(), n = truth.cols();
  const Index last = acq.fov_last_row < 0 ? m - 1 : std::min(acq.fov_last_row, m - 1);

  std::mt19937_64 rng(acq.seed);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  std::normal_distribution<double> unit(0.0, 1.0);

  Mask mask = Mask::Constant(m, n, false);
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(m, n);
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < m; ++r) {
      // One draw per pixel keeps the stream aligned across FOV settings.
      const double p = pick(rng);
      const double z = unit(rng);
      if (r < acq.fov_first_row || r > last || !(p < acq.sampling_rate)) continue;
      const double d = truth(r, c);
      if (d > acq.max_range) continue;
      mask(r, c) = true;
      values(r, c) = std::max(0.0, d + (acq.sigma0 + acq.sigma1 * d) * z);
    }
  }
  if (!mask.any()) throw std::runtime_error("sample_lidar: no samples acquired");
  return {std::move(mask), std::move(values)};
}

}  // namespace depthup
