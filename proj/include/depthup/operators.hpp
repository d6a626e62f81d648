#pragma once

#include "depthup/grid.hpp"

#include <Eigen/Core>

#include <complex>
#include <memory>

namespace depthup {

/// Periodic finite-difference operators on a column-major vectorised grid.
///
/// Both kinds map R^n -> R^{2n}. The first n outputs are the row-direction
/// block (differences taken along a row, i.e. across columns), the last n the
/// column-direction block (along a column, across rows). All stencils wrap,
/// so each block is circulant and diagonalised by the 2-D DFT.
///
///   first  (D): row block  x(r, c+1) - x(r, c)
///               col block  x(r+1, c) - x(r, c)
///   second (H): row block  x(r, c+1) - 2 x(r, c) + x(r, c-1)
///               col block  x(r+1, c) - 2 x(r, c) + x(r-1, c)
enum class DiffKind { first, second };

class DiffOperator {
 public:
  DiffOperator(DiffKind kind, Shape shape);

  DiffKind kind() const { return kind_; }
  const Shape& shape() const { return shape_; }

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd adjoint(const Eigen::Ref<const Eigen::VectorXd>& y) const;

  /// Allocation-free forms used in the solver loop; `out` must be presized.
  void apply_to(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) const;
  void adjoint_to(const Eigen::Ref<const Eigen::VectorXd>& y,
                  Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  DiffKind kind_;
  Shape shape_;
};

Eigen::VectorXd apply_first_diff(const Shape& shape, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd apply_second_diff(const Shape& shape, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd apply_adjoint(const DiffOperator& op, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Spectrum of a I + b H^T H + c D^T D on a periodic grid.
///
/// Stored as an (M/2 + 1) x N array indexed (k_r, k_c) over the
/// non-redundant half of the frequency plane. Its column-major storage is the
/// output layout of a real-to-complex DFT of a column-major M x N image.
class CirculantSpectrum {
 public:
  CirculantSpectrum(Shape shape, double a, double b, double c);

  /// Complex eigenvalues of the 1-D periodic stencils at frequency k of L.
  static std::complex<double> first_diff_eigenvalue(Index k, Index length);
  static std::complex<double> second_diff_eigenvalue(Index k, Index length);

  const Shape& shape() const { return shape_; }
  const Eigen::ArrayXXd& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(Index k_row, Index k_col) const;

 private:
  Shape shape_;
  double a_, b_, c_;
  Eigen::ArrayXXd eigenvalues_;
};

/// Solves (a I + b H^T H + c D^T D) x = rhs by pointwise division in the
/// Fourier domain. Owns its FFT plans and scratch buffers; one instance per
/// thread.
class CirculantSolver {
 public:
  CirculantSolver(Shape shape, double a, double b, double c);
  ~CirculantSolver();
  CirculantSolver(CirculantSolver&&) noexcept;
  CirculantSolver& operator=(CirculantSolver&&) noexcept;
  CirculantSolver(const CirculantSolver&) = delete;
  CirculantSolver& operator=(const CirculantSolver&) = delete;

  const CirculantSpectrum& spectrum() const { return spectrum_; }

  void solve(const Eigen::Ref<const Eigen::VectorXd>& rhs, Eigen::Ref<Eigen::VectorXd> out);
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& rhs);

 private:
  struct Plans;
  CirculantSpectrum spectrum_;
  std::unique_ptr<Plans> plans_;
};

Eigen::VectorXd circulant_solve(const Shape& shape, double a, double b, double c,
                                const Eigen::Ref<const Eigen::VectorXd>& rhs);

/// (a I + b H^T H + c D^T D) x evaluated with the stencils, no FFT.
Eigen::VectorXd apply_normal_operator(const Shape& shape, double a, double b, double c,
                                      const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace depthup
