#pragma once

#include "depthup/grid.hpp"
#include "depthup/prior.hpp"

#include <Eigen/Core>

#include <string>

namespace depthup {

/// Diagonals of W1 (on the second-difference term) and W2 (on the
/// prior-difference term), each of length 2n in the operator block layout.
struct WeightMasks {
  Eigen::VectorXd w1;
  Eigen::VectorXd w2;

  static WeightMasks identity(const Shape& s) {
    return {Eigen::VectorXd::Ones(2 * s.size()), Eigen::VectorXd::Ones(2 * s.size())};
  }
};

/// Which second-difference entries a prior jump switches off.
///
/// A jump carried by first difference i shows up in the two second
/// differences whose stencils straddle it.
///  - `aligned`: the pair for the library's forward-difference operators.
///    Row block: i and i + M (next column). Column block: j and j + 1 (next
///    row, not crossing into the next column).
///  - `printed`: w1[i] = 0 if u[i] or u[i+1] is nonzero in the row block,
///    and if u[j] or u[j+M] is nonzero in the column block, i.e. a jump at s
///    also clears s - 1 (row block) or s - M (column block). Kept for
///    comparison with the original formulation; it does not match the
///    stencils of this library.
/// Both clip at the block end instead of wrapping.
enum class WeightStencil { aligned, printed };

WeightStencil parse_weight_stencil(const std::string& name);
std::string to_string(WeightStencil s);

/// w1 is 0 wherever a straddling jump exists and 1 elsewhere; w2 is all ones.
WeightMasks build_weights(const InformingPrior& prior, WeightStencil stencil = WeightStencil::aligned);

}  // namespace depthup
