#include "depthup/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace depthup {
namespace {

Eigen::ArrayXd masked_errors(const DepthGrid& estimate, const DepthGrid& truth, const EvalMask& mask) {
  check_same_shape(estimate.shape(), truth.shape(), "metrics");
  check_same_shape(estimate.shape(), shape_of(mask), "metrics mask");
  const Index count = mask.count();
  if (count == 0) throw std::invalid_argument("metrics: evaluation mask is empty");
  Eigen::ArrayXd err(count);
  Index k = 0;
  for (Index i = 0; i < mask.size(); ++i) {
    if (mask(i)) err(k++) = estimate.values()(i) - truth.values()(i);
  }
  return err;
}

}  // namespace

EvalMask valid_truth_mask(const DepthGrid& truth) { return truth.values().array() > 0.0; }

double mae(const DepthGrid& estimate, const DepthGrid& truth, const EvalMask& mask) {
  return masked_errors(estimate, truth, mask).abs().mean();
}

double rmse(const DepthGrid& estimate, const DepthGrid& truth, const EvalMask& mask) {
  return std::sqrt(masked_errors(estimate, truth, mask).square().mean());
}

ErrorMetrics evaluate(const DepthGrid& estimate, const DepthGrid& truth, const EvalMask& mask) {
  const Eigen::ArrayXd err = masked_errors(estimate, truth, mask);
  return {err.abs().mean(), std::sqrt(err.square().mean()), err.size()};
}

}  // namespace depthup
