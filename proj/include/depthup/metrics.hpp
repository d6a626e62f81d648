#pragma once

#include "depthup/grid.hpp"

namespace depthup {

/// Pixels where ground truth is valid.
using EvalMask = Mask;

/// Truth pixels with positive finite depth (0 marks "no ground truth").
EvalMask valid_truth_mask(const DepthGrid& truth);

double mae(const DepthGrid& estimate, const DepthGrid& truth, const EvalMask& mask);
double rmse(const DepthGrid& estimate, const DepthGrid& truth, const EvalMask& mask);

struct ErrorMetrics {
  double mae = 0.0;
  double rmse = 0.0;
  Index pixels = 0;
};

ErrorMetrics evaluate(const DepthGrid& estimate, const DepthGrid& truth, const EvalMask& mask);

}  // namespace depthup
