#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "tsfloquet/transition.hpp"

using namespace tsfloquet;
using tsfloquet::testing::expm;
using tsfloquet::testing::rel_err;

namespace {

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ConfigError;
}

}  // namespace

TEST(Transition, ConstantOnIntegersIsMatrixPower) {
  const Matrix a = mat2(0.1, 0.4, -0.3, 0.2);
  const auto ts = TimeScaleWindow::integer(0, 20);
  Matrix want = Matrix::Identity(2, 2);
  for (int k = 0; k < 7; ++k) want = (Matrix::Identity(2, 2) + a) * want;
  EXPECT_LT(rel_err(transition_matrix(MatrixFunction::constant(a), ts, 9, 2), want), 1e-14);
}

TEST(Transition, ConstantOnRealsIsMatrixExponential) {
  const Matrix a = mat2(-0.2, 1.0, -1.5, 0.1);
  const auto ts = TimeScaleWindow::real(0, 10);
  EXPECT_LT(rel_err(transition_matrix(MatrixFunction::constant(a), ts, 4.5, 0.5), expm(4.0 * a)), 1e-9);
}

TEST(Transition, MixedScaleComposesJumpsAndFlows) {
  const Matrix a = mat2(0.0, 1.0, -1.0, 0.0);
  const TimeScaleWindow ts({{0, 1}, {1.5, 1.5}, {2, 3}});
  const Matrix I = Matrix::Identity(2, 2);
  const Matrix want = expm(a) * (I + 0.5 * a) * (I + 0.5 * a) * expm(a);
  EXPECT_LT(rel_err(transition_matrix(MatrixFunction::constant(a), ts, 3, 0), want), 1e-9);
}

TEST(Transition, DiagonalOnQScale) {
  const auto ts = TimeScaleWindow::q_scale(2, 1, 1024);
  auto A = MatrixFunction::from_exprs({{Expr::parse("1/t"), Expr::parse("0")},
                                       {Expr::parse("0"), Expr::parse("-0.5/t")}});
  const Matrix phi = transition_matrix(A, ts, 32, 1);
  EXPECT_NEAR(std::abs(phi(0, 0) - 32.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(phi(1, 1) - std::pow(0.5, 5)), 0.0, 1e-15);
  EXPECT_EQ(std::abs(phi(0, 1)), 0.0);
}

TEST(Transition, AgreesWithPeanoBaker) {
  // Non-commuting time-varying A on a scale with dense and scattered parts.
  const TimeScaleWindow ts({{0, 0.75}, {1, 1}, {1.5, 2}, {2.25, 2.25}, {2.5, 3}});
  auto A = MatrixFunction::from_exprs({{Expr::parse("cos(t)"), Expr::parse("1")},
                                       {Expr::parse("-t/2"), Expr::parse("0.1")}});
  const Matrix rk = transition_matrix(A, ts, 3, 0);
  const Matrix pb = peano_baker(A, ts, 3, 0, 30);
  EXPECT_LT(rel_err(rk, pb), 1e-8);
}

TEST(Transition, SatisfiesDynamicEquation) {
  const TimeScaleWindow ts({{0, 1}, {1.5, 1.5}, {2, 3}});
  auto A = MatrixFunction::from_exprs({{Expr::parse("sin(t)"), Expr::parse("1")},
                                       {Expr::parse("-1"), Expr::parse("0")}});
  for (double t : {0.4, 1.0, 1.5, 2.5}) {
    auto phi = [&](double x) { return transition_matrix(A, ts, x, 0); };
    const Matrix lhs = delta_derivative(phi, ts, t);
    EXPECT_LT(rel_err(lhs, A(t) * phi(t)), 1e-6) << t;
  }
}

TEST(Transition, BackwardIsInverse) {
  const TimeScaleWindow ts({{0, 1}, {1.5, 1.5}, {2, 3}});
  auto A = MatrixFunction::from_exprs({{Expr::parse("t"), Expr::parse("1")},
                                       {Expr::parse("0"), Expr::parse("-1")}});
  const Matrix fwd = transition_matrix(A, ts, 2.5, 0.5);
  const Matrix bwd = transition_matrix(A, ts, 0.5, 2.5);
  EXPECT_LT((fwd * bwd - Matrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LT((transition_matrix(A, ts, 1.5, 1.5) - Matrix::Identity(2, 2)).norm(), 0.0 + 1e-300);
}

TEST(Transition, PathMatchesPointwise) {
  const TimeScaleWindow ts({{0, 1}, {1.5, 1.5}, {2, 3}});
  auto A = MatrixFunction::from_exprs({{Expr::parse("cos(t)"), Expr::parse("1")},
                                       {Expr::parse("-1"), Expr::parse("0")}});
  const std::vector<double> times{0.0, 0.5, 1.0, 1.5, 2.0, 2.75, 3.0};
  const auto path = transition_path(A, ts, 0, times);
  ASSERT_EQ(path.size(), times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    EXPECT_LT(rel_err(path[k], transition_matrix(A, ts, times[k], 0)), 1e-9) << times[k];
  }
}

TEST(Transition, SemigroupProperty) {
  const auto ts = TimeScaleWindow::geometric_union(3, 2, 1, 243);
  auto A = MatrixFunction::from_exprs({{Expr::parse("0.2/t"), Expr::parse("1/t")},
                                       {Expr::parse("-1/t"), Expr::parse("0")}});
  const Matrix lhs = transition_matrix(A, ts, 27, 1);
  const Matrix rhs = transition_matrix(A, ts, 27, 4.5) * transition_matrix(A, ts, 4.5, 1);
  EXPECT_LT(rel_err(lhs, rhs), 1e-9);
}

TEST(Transition, VariationOfConstantsScalar) {
  // y' = -y + 1 on the reals: y = 1 + (y0 - 1) e^{-(t - t0)}.
  const auto ts = TimeScaleWindow::real(0, 10);
  Matrix a(1, 1);
  a << -1.0;
  Matrix f(1, 1);
  f << 1.0;
  Vector x0(1);
  x0 << 3.0;
  const Vector y = variation_of_constants(MatrixFunction::constant(a), MatrixFunction::constant(f), ts,
                                          2.0, 0.0, x0);
  EXPECT_NEAR(std::abs(y(0) - (1.0 + 2.0 * std::exp(-2.0))), 0.0, 1e-9);
}

TEST(Transition, VariationOfConstantsOnMixedScale) {
  // Oracle: explicit recurrence on scattered points, RK on the dense cell.
  const TimeScaleWindow ts({{0, 0}, {1, 1}, {3, 3}, {4, 6}});
  auto A = MatrixFunction::from_exprs({{Expr::parse("0.5"), Expr::parse("1")},
                                       {Expr::parse("0"), Expr::parse("-0.25")}});
  auto F = MatrixFunction::column_from_exprs({Expr::parse("t"), Expr::parse("1")});
  Vector x0(2);
  x0 << 1.0, -1.0;
  Vector y = x0;
  for (auto [t, mu] : {std::pair{0.0, 1.0}, std::pair{1.0, 2.0}, std::pair{3.0, 1.0}}) {
    y = y + mu * (A(t) * y + F(t));
  }
  // On [4, 6] the system is y' = A y + F with constant A: augment to a homogeneous one.
  Matrix big = Matrix::Zero(4, 4);
  big.block(0, 0, 2, 2) = A(0);
  big(0, 2) = 1.0;  // t
  big(1, 3) = 1.0;  // constant 1
  big(2, 3) = 1.0;  // d/dt t = 1
  Vector aug(4);
  aug << y(0), y(1), 4.0, 1.0;
  const Vector want = (expm(2.0 * big) * aug).head(2);
  const Vector got = variation_of_constants(A, F, ts, 6, 0, x0);
  EXPECT_LT((got - want).norm() / want.norm(), 1e-9);
}

TEST(Transition, NonRegressiveJumpThrows) {
  const auto ts = TimeScaleWindow::integer(0, 10);
  Matrix a(1, 1);
  a << -1.0;
  EXPECT_EQ(code_of([&] { (void)transition_matrix(MatrixFunction::constant(a), ts, 4, 0); }),
            ErrorCode::RegressivityViolation);
}

TEST(Transition, NonFiniteCoefficientThrows) {
  const auto ts = TimeScaleWindow::integer(-2, 2);
  MatrixFunction A(1, 1, [](double t) {
    return Matrix::Constant(1, 1, t == 0.0 ? Complex(HUGE_VAL, 0.0) : Complex(1.0, 0.0));
  });
  EXPECT_EQ(code_of([&] { (void)transition_matrix(A, ts, 2, -2); }), ErrorCode::NonFiniteValue);
  auto B = MatrixFunction::from_exprs({{Expr::parse("1/(t*t)")}});
  EXPECT_EQ(code_of([&] { (void)transition_matrix(B, ts, 2, -2); }), ErrorCode::DomainError);
}

TEST(Transition, RandomConstantSystemsOnReals) {
  std::mt19937_64 rng(7);
  const auto ts = TimeScaleWindow::real(0, 5);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = tsfloquet::testing::random_matrix(rng, 3, 0.5);
    EXPECT_LT(rel_err(transition_matrix(MatrixFunction::constant(a), ts, 2, 0), expm(2.0 * a)), 1e-8);
  }
}
