#include "depthup/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace depthup {

Eigen::VectorXd InformingPrior::vectorized() const {
  const Index n = jump_row.size();
  Eigen::VectorXd u(2 * n);
  u.head(n) = jump_row.reshaped();
  u.tail(n) = jump_col.reshaped();
  return u;
}

Index InformingPrior::support_size() const {
  return (jump_row.array() != 0.0).count() + (jump_col.array() != 0.0).count();
}

void PriorParams::validate() const {
  canny.validate();
  if (window < 1) throw std::invalid_argument("prior: window must be >= 1");
  if (!(jump_threshold >= 0.0)) throw std::invalid_argument("prior: jump_threshold must be >= 0");
}

DepthGrid coarse_upsample(const SparseDepth& samples) {
  const Index k = samples.sample_count();
  if (k == 0) throw std::invalid_argument("coarse_upsample: no samples");
  const Index m = samples.rows(), n = samples.cols();
  const Mask& mask = samples.mask();

  // Bucket samples into square cells, then search outward ring by ring until
  // no unvisited cell can hold a closer (or equally close, lower-index) sample.
  const double density = static_cast<double>(m * n) / static_cast<double>(k);
  const Index cell = std::max<Index>(1, static_cast<Index>(std::lround(std::sqrt(density))));
  const Index grid_rows = (m + cell - 1) / cell, grid_cols = (n + cell - 1) / cell;
  std::vector<std::vector<Index>> buckets(static_cast<size_t>(grid_rows * grid_cols));
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < m; ++r) {
      if (mask(r, c)) buckets[static_cast<size_t>((c / cell) * grid_rows + r / cell)].push_back(c * m + r);
    }
  }

  const Index max_ring = std::max(grid_rows, grid_cols);
  Eigen::MatrixXd out(m, n);
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < m; ++r) {
      if (mask(r, c)) {
        out(r, c) = samples.values()(r, c);
        continue;
      }
      const Index cr = r / cell, cc = c / cell;
      Index best = -1;
      Index best_d2 = std::numeric_limits<Index>::max();
      auto visit = [&](Index br, Index bc) {
        if (br < 0 || br >= grid_rows || bc < 0 || bc >= grid_cols) return;
        for (const Index idx : buckets[static_cast<size_t>(bc * grid_rows + br)]) {
          const Index dr = idx % m - r, dc = idx / m - c;
          const Index d2 = dr * dr + dc * dc;
          if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
            best_d2 = d2;
            best = idx;
          }
        }
      };
      for (Index ring = 0; ring <= max_ring; ++ring) {
        if (best >= 0) {
          const Index bound = (ring - 1) * cell + 1;
          if (ring > 0 && bound * bound > best_d2) break;
        }
        if (ring == 0) {
          visit(cr, cc);
          continue;
        }
        for (Index t = -ring; t <= ring; ++t) {
          visit(cr - ring, cc + t);
          visit(cr + ring, cc + t);
        }
        for (Index t = -ring + 1; t <= ring - 1; ++t) {
          visit(cr + t, cc - ring);
          visit(cr + t, cc + ring);
        }
      }
      out(r, c) = samples.values()(best % m, best / m);
    }
  }
  return DepthGrid(std::move(out));
}

double median_inplace(std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("median of empty window");
  const size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

InformingPrior estimate_jumps(const EdgeMask& edges, const DepthGrid& coarse, Index window,
                              double jump_threshold) {
  if (window < 1) throw std::invalid_argument("estimate_jumps: window must be >= 1");
  check_same_shape(edges.shape(), coarse.shape(), "estimate_jumps");
  const Index m = coarse.rows(), n = coarse.cols();
  const Eigen::MatrixXd& x = coarse.values();
  InformingPrior prior = InformingPrior::zero(coarse.shape());

  std::vector<double> before, after;
  auto jump = [&]() {
    if (before.empty() || after.empty()) return 0.0;
    const double d = median_inplace(after) - median_inplace(before);
    return std::abs(d) > jump_threshold ? d : 0.0;
  };

  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < m; ++r) {
      if (!edges.edge(r, c)) continue;

      before.clear();
      after.clear();
      for (Index t = std::max<Index>(0, c - window); t < c; ++t) before.push_back(x(r, t));
      for (Index t = c + 1; t <= std::min(n - 1, c + window); ++t) after.push_back(x(r, t));
      prior.jump_row(r, c) = jump();

      before.clear();
      after.clear();
      for (Index t = std::max<Index>(0, r - window); t < r; ++t) before.push_back(x(t, c));
      for (Index t = r + 1; t <= std::min(m - 1, r + window); ++t) after.push_back(x(t, c));
      prior.jump_col(r, c) = jump();
    }
  }
  return prior;
}

PriorBuild build_prior_detailed(const SparseDepth& samples, const IntensityGrid& image,
                                const PriorParams& params) {
  params.validate();
  check_same_shape(samples.shape(), image.shape(), "build_prior");
  DepthGrid coarse = coarse_upsample(samples);
  EdgeMask edges = detect_edges(image, params.canny);
  InformingPrior prior = estimate_jumps(edges, coarse, params.window, params.jump_threshold);
  return {std::move(coarse), std::move(edges), std::move(prior)};
}

InformingPrior build_prior(const SparseDepth& samples, const IntensityGrid& image,
                           const PriorParams& params) {
  return build_prior_detailed(samples, image, params).prior;
}

}  // namespace depthup
