#include "depthup/operators.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace depthup {
namespace {

void check_length(Index got, Index want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(want) +
                                ", got " + std::to_string(got));
  }
}

// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void first_diff(const Shape& s, const double* x, double* out) {
  const Index m = s.rows, n_cols = s.cols, n = s.size();
  for (Index c = 0; c < n_cols; ++c) {
    const double* col = x + c * m;
    const double* next_col = x + ((c + 1) % n_cols) * m;
    double* row_blk = out + c * m;
    double* col_blk = out + n + c * m;
    for (Index r = 0; r < m; ++r) row_blk[r] = next_col[r] - col[r];
    for (Index r = 0; r + 1 < m; ++r) col_blk[r] = col[r + 1] - col[r];
    col_blk[m - 1] = col[0] - col[m - 1];
  }
}

void first_diff_adjoint(const Shape& s, const double* y, double* out) {
  const Index m = s.rows, n_cols = s.cols, n = s.size();
  for (Index c = 0; c < n_cols; ++c) {
    const double* row_blk = y + c * m;
    const double* prev_row_blk = y + ((c + n_cols - 1) % n_cols) * m;
    const double* col_blk = y + n + c * m;
    double* o = out + c * m;
    for (Index r = 0; r < m; ++r) o[r] = prev_row_blk[r] - row_blk[r];
    o[0] += col_blk[m - 1] - col_blk[0];
    for (Index r = 1; r < m; ++r) o[r] += col_blk[r - 1] - col_blk[r];
  }
}

void second_diff(const Shape& s, const double* x, double* out) {
  const Index m = s.rows, n_cols = s.cols, n = s.size();
  for (Index c = 0; c < n_cols; ++c) {
    const double* col = x + c * m;
    const double* next_col = x + ((c + 1) % n_cols) * m;
    const double* prev_col = x + ((c + n_cols - 1) % n_cols) * m;
    double* row_blk = out + c * m;
    double* col_blk = out + n + c * m;
    for (Index r = 0; r < m; ++r) row_blk[r] = next_col[r] - 2.0 * col[r] + prev_col[r];
    col_blk[0] = col[1] - 2.0 * col[0] + col[m - 1];
    for (Index r = 1; r + 1 < m; ++r) col_blk[r] = col[r + 1] - 2.0 * col[r] + col[r - 1];
    col_blk[m - 1] = col[0] - 2.0 * col[m - 1] + col[m - 2];
  }
}

// Each block of H is a symmetric circulant, so H^T y = H_r y_r + H_c y_c.
void second_diff_adjoint(const Shape& s, const double* y, double* out) {
  const Index m = s.rows, n_cols = s.cols, n = s.size();
  for (Index c = 0; c < n_cols; ++c) {
    const double* row_blk = y + c * m;
    const double* next_row_blk = y + ((c + 1) % n_cols) * m;
    const double* prev_row_blk = y + ((c + n_cols - 1) % n_cols) * m;
    const double* col_blk = y + n + c * m;
    double* o = out + c * m;
    for (Index r = 0; r < m; ++r) o[r] = next_row_blk[r] - 2.0 * row_blk[r] + prev_row_blk[r];
    o[0] += col_blk[1] - 2.0 * col_blk[0] + col_blk[m - 1];
    for (Index r = 1; r + 1 < m; ++r) o[r] += col_blk[r + 1] - 2.0 * col_blk[r] + col_blk[r - 1];
    o[m - 1] += col_blk[0] - 2.0 * col_blk[m - 1] + col_blk[m - 2];
  }
}

}  // namespace

DiffOperator::DiffOperator(DiffKind kind, Shape shape) : kind_(kind), shape_(shape) {
  check_shape(shape_);
}

void DiffOperator::apply_to(const Eigen::Ref<const Eigen::VectorXd>& x,
                            Eigen::Ref<Eigen::VectorXd> out) const {
  check_length(x.size(), shape_.size(), "DiffOperator::apply");
  check_length(out.size(), 2 * shape_.size(), "DiffOperator::apply output");
  if (kind_ == DiffKind::first) {
    first_diff(shape_, x.data(), out.data());
  } else {
    second_diff(shape_, x.data(), out.data());
  }
}

void DiffOperator::adjoint_to(const Eigen::Ref<const Eigen::VectorXd>& y,
                              Eigen::Ref<Eigen::VectorXd> out) const {
  check_length(y.size(), 2 * shape_.size(), "DiffOperator::adjoint");
  check_length(out.size(), shape_.size(), "DiffOperator::adjoint output");
  if (kind_ == DiffKind::first) {
    first_diff_adjoint(shape_, y.data(), out.data());
  } else {
    second_diff_adjoint(shape_, y.data(), out.data());
  }
}

Eigen::VectorXd DiffOperator::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd out(2 * shape_.size());
  apply_to(x, out);
  return out;
}

Eigen::VectorXd DiffOperator::adjoint(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  Eigen::VectorXd out(shape_.size());
  adjoint_to(y, out);
  return out;
}

Eigen::VectorXd apply_first_diff(const Shape& shape, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return DiffOperator(DiffKind::first, shape).apply(x);
}

Eigen::VectorXd apply_second_diff(const Shape& shape, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return DiffOperator(DiffKind::second, shape).apply(x);
}

Eigen::VectorXd apply_adjoint(const DiffOperator& op, const Eigen::Ref<const Eigen::VectorXd>& y) {
  return op.adjoint(y);
}

Eigen::VectorXd apply_normal_operator(const Shape& shape, double a, double b, double c,
                                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  const DiffOperator d(DiffKind::first, shape);
  const DiffOperator h(DiffKind::second, shape);
  Eigen::VectorXd out = a * x;
  if (b != 0.0) out += b * h.adjoint(h.apply(x));
  if (c != 0.0) out += c * d.adjoint(d.apply(x));
  return out;
}

// ---------------------------------------------------------------------------

std::complex<double> CirculantSpectrum::first_diff_eigenvalue(Index k, Index length) {
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(length);
  return std::polar(1.0, theta) - 1.0;
}

std::complex<double> CirculantSpectrum::second_diff_eigenvalue(Index k, Index length) {
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(length);
  return {2.0 * std::cos(theta) - 2.0, 0.0};
}

CirculantSpectrum::CirculantSpectrum(Shape shape, double a, double b, double c)
    : shape_(shape), a_(a), b_(b), c_(c) {
  check_shape(shape_);
  const Index half = shape_.rows / 2 + 1;
  eigenvalues_.resize(half, shape_.cols);
  for (Index kc = 0; kc < shape_.cols; ++kc) {
    const double d_col = std::norm(first_diff_eigenvalue(kc, shape_.cols));
    const double h_col = std::norm(second_diff_eigenvalue(kc, shape_.cols));
    for (Index kr = 0; kr < half; ++kr) {
      const double d_row = std::norm(first_diff_eigenvalue(kr, shape_.rows));
      const double h_row = std::norm(second_diff_eigenvalue(kr, shape_.rows));
      eigenvalues_(kr, kc) = a_ + b_ * (h_row + h_col) + c_ * (d_row + d_col);
    }
  }
}

double CirculantSpectrum::eigenvalue(Index k_row, Index k_col) const {
  // Every term depends on cos(2 pi k / L) only, so k_r -> M - k_r is a symmetry.
  const Index kr = k_row <= shape_.rows / 2 ? k_row : shape_.rows - k_row;
  return eigenvalues_(kr, k_col);
}

// ---------------------------------------------------------------------------

struct CirculantSolver::Plans {
  Index n = 0;
  Index n_freq = 0;
  double* real = nullptr;
  fftw_complex* freq = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plans(const Shape& s) : n(s.size()), n_freq((s.rows / 2 + 1) * s.cols) {
    real = fftw_alloc_real(static_cast<size_t>(n));
    freq = fftw_alloc_complex(static_cast<size_t>(n_freq));
    if (real == nullptr || freq == nullptr) throw std::bad_alloc();
    // Column-major M x N is row-major N x M.
    const int n0 = static_cast<int>(s.cols);
    const int n1 = static_cast<int>(s.rows);
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_2d(n0, n1, real, freq, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_2d(n0, n1, freq, real, FFTW_ESTIMATE);
    if (forward == nullptr || backward == nullptr) throw std::runtime_error("FFTW planning failed");
  }

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (backward != nullptr) fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(freq);
  }

  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

CirculantSolver::CirculantSolver(Shape shape, double a, double b, double c)
    : spectrum_(shape, a, b, c) {
  if (!(a > 0.0)) throw std::invalid_argument("circulant_solve: a must be > 0");
  if (b < 0.0 || c < 0.0) throw std::invalid_argument("circulant_solve: b and c must be >= 0");
  plans_ = std::make_unique<Plans>(shape);
}

CirculantSolver::~CirculantSolver() = default;
CirculantSolver::CirculantSolver(CirculantSolver&&) noexcept = default;
CirculantSolver& CirculantSolver::operator=(CirculantSolver&&) noexcept = default;

void CirculantSolver::solve(const Eigen::Ref<const Eigen::VectorXd>& rhs,
                            Eigen::Ref<Eigen::VectorXd> out) {
  const Index n = plans_->n;
  check_length(rhs.size(), n, "circulant_solve");
  check_length(out.size(), n, "circulant_solve output");

  std::copy(rhs.data(), rhs.data() + n, plans_->real);
  fftw_execute(plans_->forward);

  // FFTW transforms are unnormalised; fold 1/n into the division.
  const double* lambda = spectrum_.eigenvalues().data();
  const double scale = static_cast<double>(n);
  for (Index k = 0; k < plans_->n_freq; ++k) {
    const double inv = 1.0 / (lambda[k] * scale);
    plans_->freq[k][0] *= inv;
    plans_->freq[k][1] *= inv;
  }

  fftw_execute(plans_->backward);
  std::copy(plans_->real, plans_->real + n, out.data());
}

Eigen::VectorXd CirculantSolver::solve(const Eigen::Ref<const Eigen::VectorXd>& rhs) {
  Eigen::VectorXd out(plans_->n);
  solve(rhs, out);
  return out;
}

Eigen::VectorXd circulant_solve(const Shape& shape, double a, double b, double c,
                                const Eigen::Ref<const Eigen::VectorXd>& rhs) {
  CirculantSolver solver(shape, a, b, c);
  return solver.solve(rhs);
}

}  // namespace depthup
