#include "depthup/weights.hpp"

#include <stdexcept>

namespace depthup {

WeightStencil parse_weight_stencil(const std::string& name) {
  if (name == "aligned") return WeightStencil::aligned;
  if (name == "printed") return WeightStencil::printed;
  throw std::invalid_argument("unknown weight stencil '" + name + "'");
}

std::string to_string(WeightStencil s) { return s == WeightStencil::aligned ? "aligned" : "printed"; }

WeightMasks build_weights(const InformingPrior& prior, WeightStencil stencil) {
  const Shape s = prior.shape();
  const Index n = s.size(), m = s.rows;
  const Eigen::VectorXd u = prior.vectorized();
  WeightMasks w = WeightMasks::identity(s);

  auto off = [&](Index i) { w.w1(i) = 0.0; };
  for (Index i = 0; i < n; ++i) {
    if (u(i) != 0.0) {
      off(i);
      if (stencil == WeightStencil::aligned) {
        if (i + m < n) off(i + m);
      } else if (i >= 1) {
        off(i - 1);
      }
    }
    const Index j = n + i;
    if (u(j) != 0.0) {
      off(j);
      if (stencil == WeightStencil::aligned) {
        if ((i + 1) % m != 0) off(j + 1);
      } else if (i >= m) {
        off(j - m);
      }
    }
  }
  return w;
}

}  // namespace depthup
