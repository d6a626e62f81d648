#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace depthup {

using Index = Eigen::Index;

/// Boolean per-pixel mask. Column-major like every other grid in the library.
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Image dimensions. `size()` is n = rows * cols, the length of a vectorised grid.
struct Shape {
  Index rows = 0;
  Index cols = 0;

  Index size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
};

inline std::string to_string(const Shape& s) {
  return std::to_string(s.rows) + "x" + std::to_string(s.cols);
}

inline void check_shape(const Shape& s) {
  if (s.rows < 2 || s.cols < 2) {
    throw std::invalid_argument("grid must be at least 2x2, got " + to_string(s));
  }
}

inline void check_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + to_string(a) + " vs " +
                                to_string(b));
  }
}

template <typename Derived>
Shape shape_of(const Eigen::DenseBase<Derived>& m) {
  return {m.rows(), m.cols()};
}

/// Vector index of pixel (r, c) under column-wise vectorisation.
inline Index linear_index(const Shape& s, Index r, Index c) { return c * s.rows + r; }

/// Inverse of `linear_index`: i -> (i mod M, i / M).
inline std::pair<Index, Index> pixel_of(const Shape& s, Index i) {
  return {i % s.rows, i / s.rows};
}

namespace detail {

struct FiniteValues {
  template <typename Matrix>
  static void check(const Matrix& m) {
    if (!m.allFinite()) throw std::invalid_argument("depth grid contains non-finite values");
  }
};

struct UnitIntervalValues {
  template <typename Matrix>
  static void check(const Matrix& m) {
    if (!m.allFinite()) throw std::invalid_argument("intensity grid contains non-finite values");
    if (m.size() > 0 && (m.minCoeff() < 0 || m.maxCoeff() > 1)) {
      throw std::invalid_argument("intensity values must lie in [0, 1]");
    }
  }
};

}  // namespace detail

/// Immutable dense M x N scalar field backed by a column-major Eigen matrix,
/// so the storage order is the library's vectorisation order.
template <typename Scalar_, typename Policy>
class Grid {
 public:
  using Scalar = Scalar_;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Grid(Index rows, Index cols, Scalar fill = Scalar(0))
      : Grid(Matrix::Constant(rows, cols, fill)) {}

  explicit Grid(Matrix values) : values_(std::move(values)) {
    check_shape(shape());
    Policy::check(values_);
  }

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  Index size() const { return values_.size(); }
  Shape shape() const { return {rows(), cols()}; }

  Scalar operator()(Index r, Index c) const { return values_(r, c); }
  const Matrix& values() const { return values_; }

  /// n-vector view in column-wise order; aliases the grid storage.
  Eigen::Map<const Vector> vector_view() const { return {values_.data(), values_.size()}; }

  bool operator==(const Grid& other) const {
    return shape() == other.shape() && values_ == other.values_;
  }

 private:
  Matrix values_;
};

template <typename Scalar>
using DepthGridT = Grid<Scalar, detail::FiniteValues>;
template <typename Scalar>
using IntensityGridT = Grid<Scalar, detail::UnitIntervalValues>;

/// Dense depth field in metres. Physical inputs are additionally non-negative
/// (see `is_physical`); solver output may dip below zero.
using DepthGrid = DepthGridT<double>;
/// Grayscale image in [0, 1].
using IntensityGrid = IntensityGridT<double>;

template <typename Scalar>
bool is_physical(const DepthGridT<Scalar>& g) {
  return g.values().minCoeff() >= Scalar(0);
}

template <typename Scalar, typename Policy>
typename Grid<Scalar, Policy>::Vector vectorize(const Grid<Scalar, Policy>& g) {
  return g.vector_view();
}

template <typename Derived>
DepthGridT<typename Derived::Scalar> devectorize(const Eigen::MatrixBase<Derived>& v, Index rows,
                                                 Index cols) {
  using Scalar = typename Derived::Scalar;
  if (v.size() != rows * cols) {
    throw std::invalid_argument("devectorize: length " + std::to_string(v.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
  typename DepthGridT<Scalar>::Matrix m = v.derived().reshaped(rows, cols);
  return DepthGridT<Scalar>(std::move(m));
}

/// Sparse depth samples: the diagonal of S as a mask, and b as a dense grid
/// that is zero off the mask. An empty sample set is representable; the
/// operations that need samples reject it.
class SparseDepth {
 public:
  SparseDepth(Mask mask, Eigen::MatrixXd values) : mask_(std::move(mask)), values_(std::move(values)) {
    check_shape(shape());
    check_same_shape(shape(), shape_of(values_), "SparseDepth");
    for (Index c = 0; c < values_.cols(); ++c) {
      for (Index r = 0; r < values_.rows(); ++r) {
        if (!mask_(r, c)) {
          values_(r, c) = 0.0;
        } else if (!std::isfinite(values_(r, c)) || values_(r, c) < 0.0) {
          throw std::invalid_argument("sample at (" + std::to_string(r) + ", " +
                                      std::to_string(c) + ") must be finite and >= 0");
        }
      }
    }
  }

  /// Samples every pixel of `g`.
  static SparseDepth dense(const DepthGrid& g) {
    return {Mask::Constant(g.rows(), g.cols(), true), g.values()};
  }

  Index rows() const { return mask_.rows(); }
  Index cols() const { return mask_.cols(); }
  Shape shape() const { return {rows(), cols()}; }
  Index sample_count() const { return mask_.count(); }

  const Mask& mask() const { return mask_; }
  const Eigen::MatrixXd& values() const { return values_; }

  /// diag(S) as a 0/1 vector.
  Eigen::VectorXd selector() const { return mask_.cast<double>().reshaped(); }
  /// b, zero where unsampled.
  Eigen::VectorXd measurements() const { return values_.reshaped(); }

  bool operator==(const SparseDepth& o) const {
    return shape() == o.shape() && (mask_ == o.mask_).all() && values_ == o.values_;
  }

 private:
  Mask mask_;
  Eigen::MatrixXd values_;
};

}  // namespace depthup
