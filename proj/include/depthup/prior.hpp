#pragma once

#include "depthup/grid.hpp"

#include <Eigen/Core>

#include <vector>

namespace depthup {

/// Binary edge map of an intensity image.
struct EdgeMask {
  Mask edge;

  Shape shape() const { return shape_of(edge); }
  Index count() const { return edge.count(); }
};

/// Canny parameters. Thresholds are fractions of the maximum gradient
/// magnitude of the smoothed image.
struct CannyParams {
  double gaussian_sigma = 1.0;
  double low_threshold = 0.1;
  double high_threshold = 0.25;

  void validate() const;
};

/// Signed depth jumps at edge pixels, aligned with the forward first
/// differences: `jump_row(r, c)` estimates x(r, c+1) - x(r, c) and
/// `jump_col(r, c)` estimates x(r+1, c) - x(r, c).
struct InformingPrior {
  Eigen::MatrixXd jump_row;
  Eigen::MatrixXd jump_col;

  static InformingPrior zero(const Shape& s) {
    return {Eigen::MatrixXd::Zero(s.rows, s.cols), Eigen::MatrixXd::Zero(s.rows, s.cols)};
  }

  Shape shape() const { return shape_of(jump_row); }
  /// u_hat = [vec(jump_row); vec(jump_col)], length 2n.
  Eigen::VectorXd vectorized() const;
  Index support_size() const;
  bool is_zero() const { return support_size() == 0; }

  bool operator==(const InformingPrior& o) const {
    return jump_row == o.jump_row && jump_col == o.jump_col;
  }
};

struct PriorParams {
  CannyParams canny;
  /// Pixels on each side of an edge fed to the median (M_p).
  Index window = 5;
  /// Jumps with magnitude <= this are treated as texture and dropped (metres).
  double jump_threshold = 0.05;

  void validate() const;
};

/// Nearest-sample fill: each pixel takes the value of the closest sample in
/// Euclidean pixel distance, ties going to the smaller vector index.
DepthGrid coarse_upsample(const SparseDepth& samples);

EdgeMask detect_edges(const IntensityGrid& image, const CannyParams& params);

/// Median of `values` (mean of the two middle elements for even counts).
/// Reorders its argument.
double median_inplace(std::vector<double>& values);

InformingPrior estimate_jumps(const EdgeMask& edges, const DepthGrid& coarse, Index window,
                              double jump_threshold);

/// Intermediate products kept for diagnostics.
struct PriorBuild {
  DepthGrid coarse;
  EdgeMask edges;
  InformingPrior prior;
};

PriorBuild build_prior_detailed(const SparseDepth& samples, const IntensityGrid& image,
                                const PriorParams& params);

InformingPrior build_prior(const SparseDepth& samples, const IntensityGrid& image,
                           const PriorParams& params);

}  // namespace depthup
