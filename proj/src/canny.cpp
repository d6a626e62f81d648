#include "depthup/prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace depthup {
namespace {

Eigen::VectorXd gaussian_kernel(double sigma) {
  const Index radius = std::max<Index>(1, static_cast<Index>(std::ceil(3.0 * sigma)));
  Eigen::VectorXd k(2 * radius + 1);
  for (Index i = -radius; i <= radius; ++i) {
    k(i + radius) = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
  }
  return k / k.sum();
}

Index clamp_index(Index i, Index n) { return std::clamp<Index>(i, 0, n - 1); }

// Separable convolution with replicated borders.
Eigen::MatrixXd smooth(const Eigen::MatrixXd& img, const Eigen::VectorXd& k) {
  const Index m = img.rows(), n = img.cols(), radius = k.size() / 2;
  Eigen::MatrixXd tmp(m, n), out(m, n);
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < m; ++r) {
      double acc = 0.0;
      for (Index t = -radius; t <= radius; ++t) acc += k(t + radius) * img(r, clamp_index(c + t, n));
      tmp(r, c) = acc;
    }
  }
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < m; ++r) {
      double acc = 0.0;
      for (Index t = -radius; t <= radius; ++t) acc += k(t + radius) * tmp(clamp_index(r + t, m), c);
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

void CannyParams::validate() const {
  if (!(gaussian_sigma > 0.0)) throw std::invalid_argument("canny: gaussian_sigma must be > 0");
  if (!(low_threshold > 0.0 && low_threshold < high_threshold && high_threshold <= 1.0)) {
    throw std::invalid_argument("canny: need 0 < low_threshold < high_threshold <= 1");
  }
}

EdgeMask detect_edges(const IntensityGrid& image, const CannyParams& params) {
  params.validate();
  const Index m = image.rows(), n = image.cols();
  const Eigen::MatrixXd s = smooth(image.values(), gaussian_kernel(params.gaussian_sigma));

  Eigen::MatrixXd gx(m, n), gy(m, n);
  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < m; ++r) {
      gx(r, c) = 0.5 * (s(r, clamp_index(c + 1, n)) - s(r, clamp_index(c - 1, n)));
      gy(r, c) = 0.5 * (s(clamp_index(r + 1, m), c) - s(clamp_index(r - 1, m), c));
    }
  }
  const Eigen::MatrixXd mag = (gx.array().square() + gy.array().square()).sqrt().matrix();

  EdgeMask result{Mask::Constant(m, n, false)};
  const double peak = mag.maxCoeff();
  if (!(peak > 1e-12)) return result;
  const double low = params.low_threshold * peak;
  const double high = params.high_threshold * peak;

  auto at = [&](Index r, Index c) {
    return (r < 0 || r >= m || c < 0 || c >= n) ? 0.0 : mag(r, c);
  };

  // Non-maximum suppression over four quantised directions. Ties resolve
  // toward the smaller row/column index so a symmetric step lands on the
  // pixel whose forward difference straddles it.
  constexpr double tan22 = 0.41421356237309503;
  constexpr double tan67 = tan22 + 2.0;
  enum : unsigned char { none = 0, weak = 1, strong = 2 };
  Eigen::Array<unsigned char, Eigen::Dynamic, Eigen::Dynamic> cls =
      Eigen::Array<unsigned char, Eigen::Dynamic, Eigen::Dynamic>::Constant(m, n, none);
  std::vector<std::pair<Index, Index>> stack;

  for (Index c = 0; c < n; ++c) {
    for (Index r = 0; r < m; ++r) {
      const double v = mag(r, c);
      if (!(v > low)) continue;
      const double ax = std::abs(gx(r, c)), ay = std::abs(gy(r, c));
      bool keep = false;
      if (ay < tan22 * ax) {
        keep = v > at(r, c - 1) && v >= at(r, c + 1);
      } else if (ay > tan67 * ax) {
        keep = v > at(r - 1, c) && v >= at(r + 1, c);
      } else {
        const Index s_dir = (gx(r, c) * gy(r, c) < 0.0) ? -1 : 1;
        keep = v > at(r - 1, c - s_dir) && v > at(r + 1, c + s_dir);
      }
      if (!keep) continue;
      if (v > high) {
        cls(r, c) = strong;
        stack.emplace_back(r, c);
      } else {
        cls(r, c) = weak;
      }
    }
  }

  // Hysteresis: grow strong pixels through 8-connected weak ones.
  while (!stack.empty()) {
    const auto [r, c] = stack.back();
    stack.pop_back();
    result.edge(r, c) = true;
    for (Index dc = -1; dc <= 1; ++dc) {
      for (Index dr = -1; dr <= 1; ++dr) {
        const Index rr = r + dr, cc = c + dc;
        if (rr < 0 || rr >= m || cc < 0 || cc >= n) continue;
        if (cls(rr, cc) == weak) {
          cls(rr, cc) = strong;
          stack.emplace_back(rr, cc);
        }
      }
    }
  }
  return result;
}

}  // namespace depthup
