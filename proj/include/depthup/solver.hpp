#pragma once

#include "depthup/grid.hpp"
#include "depthup/prior.hpp"
#include "depthup/weights.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace depthup {

struct SolverConfig {
  double beta = 0.005;   // weight of the second-difference (planarity) term
  double gamma = 0.001;  // weight of the prior-guided first-difference term
  double rho = 0.02;     // ADMM penalty, shared by every constraint
  int max_iters = 500;
  double tol_primal = 1e-5;  // RMS, per constraint
  double tol_dual = 1e-5;

  void validate() const;
};

/// Equality constraints of the split problem, in this order:
///   x = r, v = H r, l = v, p = W1 l, g = D r - u, z = g, k = W2 z
inline constexpr int kConstraintCount = 7;
inline constexpr std::array<const char*, kConstraintCount> kConstraintNames = {
    "x=r", "v=Hr", "l=v", "p=W1l", "g=Dr-u", "z=g", "k=W2z"};

struct ConvergenceReport {
  int iterations = 0;
  bool converged = false;
  /// Final RMS residual of each constraint.
  std::array<double, kConstraintCount> constraint_residuals{};
  double primal_residual = 0.0;  // max over constraints
  double dual_residual = 0.0;
  std::vector<double> objective_trace;
  std::vector<double> primal_history;
  std::vector<double> dual_history;

  double final_objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

/// Primal variable, auxiliaries, and scaled dual multipliers (one per
/// constraint, same order as `kConstraintNames`).
struct SolverState {
  Eigen::VectorXd x, r;
  Eigen::VectorXd v, l, p, g, z, k;
  std::array<Eigen::VectorXd, kConstraintCount> dual;
};

struct SolveResult {
  DepthGrid depth;
  ConvergenceReport report;
  SolverState state;
};

class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int iteration)
      : std::runtime_error(what + " at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// sign(v) * max(|v| - tau, 0), elementwise.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> soft_threshold(
    const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar tau) {
  using Scalar = typename Derived::Scalar;
  if (tau < Scalar(0)) throw std::invalid_argument("soft_threshold: tau must be >= 0");
  return v.unaryExpr([tau](Scalar a) {
    const Scalar mag = std::abs(a) - tau;
    return mag > Scalar(0) ? std::copysign(mag, a) : Scalar(0);
  });
}

/// 1/2 ||S x - b||^2 + beta ||w1 .* H x||_1 + gamma ||w2 .* (D x - u)||_1
double objective(const Eigen::Ref<const Eigen::VectorXd>& x, const SparseDepth& samples,
                 const InformingPrior& prior, const WeightMasks& weights, const SolverConfig& cfg);

/// Residuals of the seven constraints for a given state (RMS each).
std::array<double, kConstraintCount> constraint_residuals(const SolverState& state,
                                                          const InformingPrior& prior,
                                                          const WeightMasks& weights);

SolveResult solve(const SparseDepth& samples, const InformingPrior& prior,
                  const WeightMasks& weights, const SolverConfig& cfg);

/// As above, warm-started from `initial` instead of the nearest-sample fill.
SolveResult solve(const SparseDepth& samples, const InformingPrior& prior,
                  const WeightMasks& weights, const SolverConfig& cfg,
                  const DepthGrid& initial);

}  // namespace depthup
