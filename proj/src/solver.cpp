#include "depthup/solver.hpp"

#include "depthup/operators.hpp"

#include <algorithm>
#include <cmath>

namespace depthup {
namespace {

double rms(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return v.size() == 0 ? 0.0 : v.norm() / std::sqrt(static_cast<double>(v.size()));
}

void check_inputs(const SparseDepth& samples, const InformingPrior& prior,
                  const WeightMasks& weights) {
  const Shape s = samples.shape();
  check_same_shape(s, prior.shape(), "solve: prior");
  check_same_shape(s, shape_of(prior.jump_col), "solve: prior");
  if (weights.w1.size() != 2 * s.size() || weights.w2.size() != 2 * s.size()) {
    throw std::invalid_argument("solve: weight vectors must have length 2n");
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(beta >= 0.0) || !(gamma >= 0.0)) throw std::invalid_argument("solver: beta, gamma must be >= 0");
  if (!(rho > 0.0)) throw std::invalid_argument("solver: rho must be > 0");
  if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) throw std::invalid_argument("solver: tolerances must be > 0");
}

double objective(const Eigen::Ref<const Eigen::VectorXd>& x, const SparseDepth& samples,
                 const InformingPrior& prior, const WeightMasks& weights, const SolverConfig& cfg) {
  check_inputs(samples, prior, weights);
  const Shape s = samples.shape();
  if (x.size() != s.size()) throw std::invalid_argument("objective: x has wrong length");
  const Eigen::VectorXd fit = samples.selector().cwiseProduct(x - samples.measurements());
  double value = 0.5 * fit.squaredNorm();
  if (cfg.beta != 0.0) {
    value += cfg.beta * weights.w1.cwiseProduct(apply_second_diff(s, x)).lpNorm<1>();
  }
  if (cfg.gamma != 0.0) {
    value += cfg.gamma *
             weights.w2.cwiseProduct(apply_first_diff(s, x) - prior.vectorized()).lpNorm<1>();
  }
  return value;
}

std::array<double, kConstraintCount> constraint_residuals(const SolverState& st,
                                                          const InformingPrior& prior,
                                                          const WeightMasks& w) {
  const Shape s = prior.shape();
  const Eigen::VectorXd u = prior.vectorized();
  return {rms(st.x - st.r),
          rms(st.v - apply_second_diff(s, st.r)),
          rms(st.v - st.l),
          rms(w.w1.cwiseProduct(st.l) - st.p),
          rms(st.g - (apply_first_diff(s, st.r) - u)),
          rms(st.g - st.z),
          rms(w.w2.cwiseProduct(st.z) - st.k)};
}

SolveResult solve(const SparseDepth& samples, const InformingPrior& prior,
                  const WeightMasks& weights, const SolverConfig& cfg) {
  if (samples.sample_count() == 0) throw std::invalid_argument("solve: no samples");
  return solve(samples, prior, weights, cfg, coarse_upsample(samples));
}

// Two-block ADMM. The constraint graph is a tree, so its variables split into
// {r, l, z} and {x, v, p, g, k} with no constraint inside a block; each block
// update is then a set of independent proximal steps (one circulant solve,
// the rest elementwise).
SolveResult solve(const SparseDepth& samples, const InformingPrior& prior,
                  const WeightMasks& weights, const SolverConfig& cfg, const DepthGrid& initial) {
  cfg.validate();
  check_inputs(samples, prior, weights);
  check_same_shape(samples.shape(), initial.shape(), "solve: initial");
  if (samples.sample_count() == 0) throw std::invalid_argument("solve: no samples");

  const Shape shape = samples.shape();
  const Index n = shape.size();
  const DiffOperator d_op(DiffKind::first, shape);
  const DiffOperator h_op(DiffKind::second, shape);
  CirculantSolver r_solver(shape, 1.0, 1.0, 1.0);

  const Eigen::VectorXd sel = samples.selector();
  const Eigen::VectorXd sb = samples.measurements();
  const Eigen::VectorXd u = prior.vectorized();
  const Eigen::VectorXd& w1 = weights.w1;
  const Eigen::VectorXd& w2 = weights.w2;
  const double rho = cfg.rho;

  SolverState st;
  st.x = initial.vector_view();
  st.r = st.x;
  st.v = h_op.apply(st.r);
  st.l = st.v;
  st.p = w1.cwiseProduct(st.l);
  st.g = d_op.apply(st.r) - u;
  st.z = st.g;
  st.k = w2.cwiseProduct(st.z);
  st.dual = {Eigen::VectorXd::Zero(n),     Eigen::VectorXd::Zero(2 * n),
             Eigen::VectorXd::Zero(2 * n), Eigen::VectorXd::Zero(2 * n),
             Eigen::VectorXd::Zero(2 * n), Eigen::VectorXd::Zero(2 * n),
             Eigen::VectorXd::Zero(2 * n)};
  auto& [mu_x, mu_v, mu_l, mu_p, mu_g, mu_z, mu_k] = st.dual;

  const Eigen::VectorXd l_denom = (1.0 + w1.array().square()).matrix();
  const Eigen::VectorXd z_denom = (1.0 + w2.array().square()).matrix();
  const Eigen::VectorXd x_denom = (sel.array() + rho).matrix();

  Eigen::VectorXd rhs(n), tmp_n(n), hr(2 * n), dr(2 * n), tmp_2n(2 * n);
  Eigen::VectorXd x_old(n), v_old(2 * n), p_old(2 * n), g_old(2 * n), k_old(2 * n);


  ConvergenceReport report;
  report.objective_trace.reserve(static_cast<size_t>(cfg.max_iters));

  for (int it = 1; it <= cfg.max_iters; ++it) {
    x_old = st.x;
    v_old = st.v;
    p_old = st.p;
    g_old = st.g;
    k_old = st.k;

    // Block A: r, l, z.
    rhs = st.x + mu_x;
    tmp_2n = st.v + mu_v;
    h_op.adjoint_to(tmp_2n, tmp_n);
    rhs += tmp_n;
    tmp_2n = st.g + u + mu_g;
    d_op.adjoint_to(tmp_2n, tmp_n);
    rhs += tmp_n;
    r_solver.solve(rhs, st.r);

    st.l = (st.v + mu_l + w1.cwiseProduct(st.p - mu_p)).cwiseQuotient(l_denom);
    st.z = (st.g + mu_z + w2.cwiseProduct(st.k - mu_k)).cwiseQuotient(z_denom);

    // Block B: x, v, p, g, k.
    h_op.apply_to(st.r, hr);
    d_op.apply_to(st.r, dr);
    st.x = (sb + rho * (st.r - mu_x)).cwiseQuotient(x_denom);
    st.v = 0.5 * ((hr - mu_v) + (st.l - mu_l));
    st.p = soft_threshold(w1.cwiseProduct(st.l) + mu_p, cfg.beta / rho);
    st.g = 0.5 * ((dr - u - mu_g) + (st.z - mu_z));
    st.k = soft_threshold(w2.cwiseProduct(st.z) + mu_k, cfg.gamma / rho);

    // Scaled dual ascent; the increments are the constraint residuals.
    std::array<double, kConstraintCount> res{};
    tmp_n = st.x - st.r;
    mu_x += tmp_n;
    res[0] = rms(tmp_n);
    tmp_2n = st.v - hr;
    mu_v += tmp_2n;
    res[1] = rms(tmp_2n);
    tmp_2n = st.v - st.l;
    mu_l += tmp_2n;
    res[2] = rms(tmp_2n);
    tmp_2n = w1.cwiseProduct(st.l) - st.p;
    mu_p += tmp_2n;
    res[3] = rms(tmp_2n);
    tmp_2n = st.g - (dr - u);
    mu_g += tmp_2n;
    res[4] = rms(tmp_2n);
    tmp_2n = st.g - st.z;
    mu_z += tmp_2n;
    res[5] = rms(tmp_2n);
    tmp_2n = w2.cwiseProduct(st.z) - st.k;
    mu_k += tmp_2n;
    res[6] = rms(tmp_2n);

    // Dual residual: rho * A^T B (change in block B), per block-A variable.
    x_old = st.x - x_old;
    v_old = st.v - v_old;
    g_old = st.g - g_old;
    h_op.adjoint_to(v_old, tmp_n);
    rhs = x_old + tmp_n;
    d_op.adjoint_to(g_old, tmp_n);
    rhs += tmp_n;
    const double s_r = rms(rhs);
    const double s_l = rms(v_old + w1.cwiseProduct(st.p - p_old));
    const double s_z = rms(g_old + w2.cwiseProduct(st.k - k_old));
    const double dual = rho * std::max({s_r, s_l, s_z});
    const double primal = *std::max_element(res.begin(), res.end());

    if (!std::isfinite(primal) || !std::isfinite(dual) || !st.x.allFinite()) {
      throw NumericalError("solve: non-finite iterate", it);
    }

    report.iterations = it;
    report.constraint_residuals = res;
    report.primal_residual = primal;
    report.dual_residual = dual;
    report.primal_history.push_back(primal);
    report.dual_history.push_back(dual);
    report.objective_trace.push_back(objective(st.x, samples, prior, weights, cfg));

    if (primal <= cfg.tol_primal && dual <= cfg.tol_dual) {
      report.converged = true;
      break;
    }
  }

  DepthGrid depth = devectorize(st.x, shape.rows, shape.cols);
  return {std::move(depth), std::move(report), std::move(st)};
}

}  // namespace depthup
