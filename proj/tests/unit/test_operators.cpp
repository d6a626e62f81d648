#include "depthup/operators.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

namespace depthup {
namespace {

using testing::dense_first_diff;
using testing::dense_second_diff;

Eigen::VectorXd random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (auto& e : v) e = normal(rng);
  return v;
}

Eigen::MatrixXd dense_normal(const Shape& s, double a, double b, double c) {
  const Eigen::MatrixXd d = dense_first_diff(s.rows, s.cols);
  const Eigen::MatrixXd h = dense_second_diff(s.rows, s.cols);
  return a * Eigen::MatrixXd::Identity(s.size(), s.size()) + b * h.transpose() * h +
         c * d.transpose() * d;
}

TEST(FirstDiff, RowBlockWrapsOnTwoByFour) {
  Eigen::MatrixXd g(2, 4);
  g << 1, 2, 4, 7,
       1, 2, 4, 7;
  const Shape s{2, 4};
  const Eigen::VectorXd out = apply_first_diff(s, g.reshaped());
  ASSERT_EQ(out.size(), 16);
  const Eigen::MatrixXd row_blk = out.head(8).reshaped(2, 4);
  const Eigen::MatrixXd col_blk = out.tail(8).reshaped(2, 4);
  EXPECT_EQ(row_blk.row(0), Eigen::RowVector4d(1, 2, 3, -6));
  EXPECT_EQ(row_blk.row(1), Eigen::RowVector4d(1, 2, 3, -6));
  EXPECT_TRUE((col_blk.array() == 0.0).all());
}

TEST(FirstDiff, ConstantGridGivesZero) {
  const Shape s{5, 3};
  EXPECT_TRUE((apply_first_diff(s, Eigen::VectorXd::Constant(15, 4.2)).array() == 0.0).all());
}

TEST(SecondDiff, AnnihilatesRampInterior) {
  const Shape s{4, 6};
  Eigen::MatrixXd g(4, 6);
  for (Index c = 0; c < 6; ++c) g.col(c).setConstant(2.0 + 0.5 * static_cast<double>(c));
  const Eigen::VectorXd out = apply_second_diff(s, g.reshaped());
  const Eigen::MatrixXd row_blk = out.head(24).reshaped(4, 6);
  for (Index c = 1; c < 5; ++c) EXPECT_TRUE((row_blk.col(c).array().abs() < 1e-14).all()) << c;
  // Wrap columns see the jump from the last column back to the first.
  EXPECT_NEAR(row_blk(0, 0), 0.5 * 6, 1e-14);
  EXPECT_NEAR(row_blk(0, 5), -0.5 * 6, 1e-14);
  EXPECT_TRUE((out.tail(24).array().abs() < 1e-14).all());
}

TEST(SecondDiff, ConstantGridGivesZeroIncludingWrap) {
  const Shape s{3, 3};
  EXPECT_TRUE((apply_second_diff(s, Eigen::VectorXd::Constant(9, -1.5)).array() == 0.0).all());
}

TEST(SecondDiff, IsFirstDiffComposedWithNegatedShift) {
  // H_r x at (r, c) = D_r x at (r, c) - D_r x at (r, c-1), same for columns.
  std::mt19937_64 rng(11);
  const Shape s{5, 7};
  const Eigen::VectorXd x = random_vector(s.size(), rng);
  const Eigen::VectorXd d = apply_first_diff(s, x);
  const Eigen::VectorXd h = apply_second_diff(s, x);
  for (Index c = 0; c < s.cols; ++c) {
    for (Index r = 0; r < s.rows; ++r) {
      const Index i = linear_index(s, r, c);
      const Index left = linear_index(s, r, (c + s.cols - 1) % s.cols);
      const Index up = linear_index(s, (r + s.rows - 1) % s.rows, c);
      EXPECT_NEAR(h(i), d(i) - d(left), 1e-12);
      EXPECT_NEAR(h(s.size() + i), d(s.size() + i) - d(s.size() + up), 1e-12);
    }
  }
}

TEST(DiffOperator, MatchesDenseConstructionExactly) {
  for (const Shape s : {Shape{6, 5}, Shape{2, 2}, Shape{3, 8}}) {
    const DiffOperator d(DiffKind::first, s), h(DiffKind::second, s);
    const Eigen::MatrixXd dd = dense_first_diff(s.rows, s.cols);
    const Eigen::MatrixXd dh = dense_second_diff(s.rows, s.cols);
    for (Index j = 0; j < s.size(); ++j) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(s.size(), j);
      EXPECT_EQ(d.apply(e), dd.col(j)) << to_string(s) << " col " << j;
      EXPECT_EQ(h.apply(e), dh.col(j)) << to_string(s) << " col " << j;
    }
    for (Index j = 0; j < 2 * s.size(); ++j) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(2 * s.size(), j);
      EXPECT_EQ(d.adjoint(e), dd.row(j).transpose());
      EXPECT_EQ(h.adjoint(e), dh.row(j).transpose());
    }
  }
}

TEST(DiffOperator, AdjointConsistency) {
  std::mt19937_64 rng(5);
  for (const DiffKind kind : {DiffKind::first, DiffKind::second}) {
    const DiffOperator op(kind, {6, 5});
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd x = random_vector(30, rng), y = random_vector(60, rng);
      EXPECT_NEAR(op.apply(x).dot(y), x.dot(apply_adjoint(op, y)), 1e-10);
    }
  }
}

TEST(DiffOperator, Linearity) {
  std::mt19937_64 rng(6);
  const DiffOperator op(DiffKind::second, {4, 7});
  const Eigen::VectorXd x = random_vector(28, rng), y = random_vector(28, rng);
  const Eigen::VectorXd lhs = op.apply(2.5 * x - 0.75 * y);
  const Eigen::VectorXd rhs = 2.5 * op.apply(x) - 0.75 * op.apply(y);
  EXPECT_LT((lhs - rhs).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(DiffOperator, ShiftInvariance) {
  std::mt19937_64 rng(7);
  const Shape s{5, 6};
  const DiffOperator op(DiffKind::first, s);
  const Eigen::MatrixXd x = random_vector(30, rng).reshaped(5, 6);
  Eigen::MatrixXd shifted(5, 6);
  for (Index c = 0; c < 6; ++c)
    for (Index r = 0; r < 5; ++r) shifted((r + 2) % 5, (c + 1) % 6) = x(r, c);
  const Eigen::VectorXd a = op.apply(x.reshaped());
  const Eigen::VectorXd b = op.apply(shifted.reshaped());
  for (Index blk = 0; blk < 2; ++blk) {
    const Eigen::MatrixXd ab = a.segment(blk * 30, 30).reshaped(5, 6);
    const Eigen::MatrixXd bb = b.segment(blk * 30, 30).reshaped(5, 6);
    for (Index c = 0; c < 6; ++c)
      for (Index r = 0; r < 5; ++r) EXPECT_DOUBLE_EQ(bb((r + 2) % 5, (c + 1) % 6), ab(r, c));
  }
}

TEST(DiffOperator, AdjointOfZeroAndDtDOfConstant) {
  const Shape s{4, 4};
  const DiffOperator d(DiffKind::first, s), h(DiffKind::second, s);
  EXPECT_TRUE((d.adjoint(Eigen::VectorXd::Zero(32)).array() == 0.0).all());
  EXPECT_TRUE((h.adjoint(Eigen::VectorXd::Zero(32)).array() == 0.0).all());
  EXPECT_TRUE((d.adjoint(d.apply(Eigen::VectorXd::Constant(16, 3.0))).array() == 0.0).all());
}

TEST(DiffOperator, RejectsLengthMismatch) {
  const Shape s{3, 4};
  const DiffOperator op(DiffKind::first, s);
  EXPECT_THROW(op.apply(Eigen::VectorXd::Zero(11)), std::invalid_argument);
  EXPECT_THROW(op.adjoint(Eigen::VectorXd::Zero(12)), std::invalid_argument);
  EXPECT_THROW(apply_second_diff(s, Eigen::VectorXd::Zero(24)), std::invalid_argument);
  EXPECT_THROW(DiffOperator(DiffKind::first, Shape{1, 4}), std::invalid_argument);
}

TEST(CirculantSpectrum, EigenvaluesMatchDenseOperatorOnFourierModes) {
  const Shape s{6, 5};
  const double a = 0.7, b = 0.3, c = 1.9;
  const CirculantSpectrum spec(s, a, b, c);
  const Eigen::MatrixXd dense = dense_normal(s, a, b, c);
  for (Index kc = 0; kc < s.cols; ++kc) {
    for (Index kr = 0; kr < s.rows; ++kr) {
      // cos modes are real eigenvectors of the real symmetric circulant operator.
      Eigen::MatrixXd mode(s.rows, s.cols);
      for (Index cc = 0; cc < s.cols; ++cc)
        for (Index r = 0; r < s.rows; ++r)
          mode(r, cc) = std::cos(2.0 * std::numbers::pi *
                                 (static_cast<double>(kr * r) / s.rows +
                                  static_cast<double>(kc * cc) / s.cols) + 0.3);
      const Eigen::VectorXd v = mode.reshaped();
      const Eigen::VectorXd av = dense * v;
      const double lambda = spec.eigenvalue(kr, kc);
      EXPECT_LT((av - lambda * v).norm(), 1e-10 * (1.0 + av.norm())) << kr << "," << kc;
      EXPECT_GE(lambda, a - 1e-15);
    }
  }
}

TEST(CirculantSpectrum, OneDimensionalEigenvalueMagnitudes) {
  for (Index len : {2, 5, 8}) {
    for (Index k = 0; k < len; ++k) {
      const double s2 = std::pow(std::sin(std::numbers::pi * static_cast<double>(k) / len), 2);
      EXPECT_NEAR(std::norm(CirculantSpectrum::first_diff_eigenvalue(k, len)), 4.0 * s2, 1e-12);
      EXPECT_NEAR(CirculantSpectrum::second_diff_eigenvalue(k, len).real(), -4.0 * s2, 1e-12);
    }
  }
}

TEST(CirculantSolve, ScaledIdentity) {
  std::mt19937_64 rng(8);
  const Shape s{5, 4};
  const Eigen::VectorXd rhs = random_vector(20, rng);
  const Eigen::VectorXd x = circulant_solve(s, 2.5, 0.0, 0.0, rhs);
  EXPECT_LT((x - rhs / 2.5).lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(CirculantSolve, ConstantRhsGivesConstantSolution) {
  const Shape s{7, 6};
  const Eigen::VectorXd x = circulant_solve(s, 4.0, 3.0, 2.0, Eigen::VectorXd::Constant(42, 8.0));
  EXPECT_LT((x.array() - 2.0).abs().maxCoeff(), 1e-13);
}

TEST(CirculantSolve, RecoversKnownSolution) {
  std::mt19937_64 rng(9);
  const Shape s{8, 8};
  const Eigen::VectorXd x0 = random_vector(64, rng);
  const Eigen::VectorXd rhs = dense_normal(s, 0.1, 2.0, 0.5) * x0;
  const Eigen::VectorXd x = circulant_solve(s, 0.1, 2.0, 0.5, rhs);
  EXPECT_LT((x - x0).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(CirculantSolve, ResidualAgainstDenseOnOddShapes) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> coef(0.0, 3.0);
  for (const Shape s : {Shape{3, 7}, Shape{9, 2}, Shape{5, 5}, Shape{2, 2}}) {
    const double a = 0.01 + coef(rng), b = coef(rng), c = coef(rng);
    const Eigen::VectorXd rhs = random_vector(s.size(), rng);
    const Eigen::VectorXd x = circulant_solve(s, a, b, c, rhs);
    EXPECT_LE((dense_normal(s, a, b, c) * x - rhs).norm(), 1e-8 * rhs.norm()) << to_string(s);
    EXPECT_LE((apply_normal_operator(s, a, b, c, x) - rhs).norm(), 1e-8 * rhs.norm());
  }
}

TEST(CirculantSolve, SolverInstanceIsReusable) {
  std::mt19937_64 rng(12);
  const Shape s{6, 9};
  CirculantSolver solver(s, 1.0, 0.5, 0.25);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd rhs = random_vector(54, rng);
    EXPECT_LT((solver.solve(rhs) - circulant_solve(s, 1.0, 0.5, 0.25, rhs)).norm(), 1e-12);
  }
  CirculantSolver moved = std::move(solver);
  const Eigen::VectorXd rhs = random_vector(54, rng);
  EXPECT_LE((apply_normal_operator(s, 1.0, 0.5, 0.25, moved.solve(rhs)) - rhs).norm(),
            1e-10 * rhs.norm());
}

TEST(CirculantSolve, RejectsBadCoefficients) {
  const Shape s{4, 4};
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(16);
  EXPECT_THROW(circulant_solve(s, 0.0, 1.0, 1.0, rhs), std::invalid_argument);
  EXPECT_THROW(circulant_solve(s, -1.0, 0.0, 0.0, rhs), std::invalid_argument);
  EXPECT_THROW(circulant_solve(s, 1.0, -0.1, 0.0, rhs), std::invalid_argument);
  EXPECT_THROW(circulant_solve(s, 1.0, 0.0, 0.0, Eigen::VectorXd::Ones(15)), std::invalid_argument);
}

}  // namespace
}  // namespace depthup
