#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "support/catalog.hpp"
#include "tsfloquet/shifts.hpp"

using namespace tsfloquet;
using tsfloquet::testing::builtin_catalog;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ConfigError;
}

}  // namespace

TEST(Shifts, MultiplicativeOnQScale) {
  const auto sys = ShiftSystem::multiplicative(2);
  EXPECT_DOUBLE_EQ(sys.forward(2, 8), 16.0);
  EXPECT_DOUBLE_EQ(sys.backward(2, 8), 4.0);
}

TEST(Shifts, ShiftByInitialPointIsIdentity) {
  for (const auto& e : builtin_catalog()) {
    for (double t : periodicity_samples(e.sys, e.ts, 20)) {
      if (e.sys.in_domain(ShiftDirection::Forward, e.sys.t0(), t)) {
        EXPECT_NEAR(e.sys.forward(e.sys.t0(), t), t, 1e-12 * std::max(1.0, std::abs(t))) << e.name;
      }
    }
  }
}

TEST(Shifts, SqrtShift) {
  EXPECT_DOUBLE_EQ(ShiftSystem::sqrt_shift(1).forward(3, 4), 5.0);
  EXPECT_DOUBLE_EQ(ShiftSystem::sqrt_shift(1).backward(3, 5), 4.0);
}

TEST(Shifts, Iterate) {
  EXPECT_DOUBLE_EQ(ShiftSystem::multiplicative(2).iterate(ShiftDirection::Forward, 2, 3, 1), 8.0);
  EXPECT_DOUBLE_EQ(ShiftSystem::multiplicative(3).iterate(ShiftDirection::Forward, 3, 1, 2), 6.0);
  EXPECT_DOUBLE_EQ(ShiftSystem::multiplicative(3).iterate(ShiftDirection::Forward, 3, 2, 1), 9.0);
  for (const auto& e : builtin_catalog()) {
    EXPECT_EQ(e.sys.iterate(ShiftDirection::Forward, e.sys.period(), 0, 0.7), 0.7);
    EXPECT_EQ(e.sys.iterate(ShiftDirection::Backward, e.sys.period(), 0, 0.7), 0.7);
  }
}

TEST(Shifts, IterateReportsFailingStep) {
  const auto sys = ShiftSystem::sqrt_shift(2);
  try {
    (void)sys.iterate(ShiftDirection::Backward, 2, 10, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
    EXPECT_NE(std::string(e.what()).find("step 7"), std::string::npos) << e.what();
  }
}

TEST(Shifts, OutOfDomain) {
  EXPECT_EQ(code_of([] { (void)ShiftSystem::sqrt_shift(1).backward(3, 2); }), ErrorCode::OutOfDomain);
  EXPECT_EQ(code_of([] { (void)ShiftSystem::logistic(0.75).forward(0.75, 1.5); }),
            ErrorCode::OutOfDomain);
}

TEST(Shifts, PeriodMustExceedInitialPoint) {
  EXPECT_EQ(code_of([] { (void)ShiftSystem::multiplicative(1); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { (void)ShiftSystem::logistic(0.4); }), ErrorCode::ConfigError);
}

TEST(Shifts, ThetaOnQScale) {
  ThetaTable theta(ShiftSystem::multiplicative(2));
  EXPECT_DOUBLE_EQ(theta.theta(8), 6.0);
  EXPECT_EQ(theta.m(8), 3u);
  EXPECT_EQ(theta.theta(1), 0.0);
}

TEST(Shifts, ThetaAtInitialPointIsZero) {
  for (const auto& e : builtin_catalog()) {
    ThetaTable theta(e.sys);
    EXPECT_EQ(theta.theta(e.sys.t0()), 0.0) << e.name;
  }
}

TEST(Shifts, ThetaOnGeometricUnion) {
  ThetaTable theta(ShiftSystem::multiplicative(3));
  EXPECT_DOUBLE_EQ(theta.theta(4), 3.0 * 2 - 9.0 / 4);
  // Closed form 3 m(t) - 3^{m(t)} / t away from anchors.
  for (double t : {1.5, 2.0, 4.0, 5.5, 6.0, 13.0, 17.0}) {
    const double m = std::ceil(std::log(t) / std::log(3.0) - 1e-12);
    EXPECT_NEAR(theta.theta(t), 3 * m - std::pow(3.0, m) / t, 1e-12) << t;
  }
}

TEST(Shifts, ThetaIterationCap) {
  ThetaTable theta(ShiftSystem::additive(1), 100);
  EXPECT_EQ(code_of([&] { (void)theta.theta(1000.0); }), ErrorCode::IterationCapExceeded);
}

TEST(Shifts, ThetaBeforeInitialPoint) {
  ThetaTable theta(ShiftSystem::multiplicative(2));
  EXPECT_EQ(code_of([&] { (void)theta.theta(0.5); }), ErrorCode::OutOfDomain);
}

TEST(Shifts, ThetaIsAdditiveClockOnAdditiveShifts) {
  ThetaTable theta(ShiftSystem::additive(1.75));
  for (double t = 0; t < 40; t += 0.37) EXPECT_NEAR(theta.theta(t), t, 1e-12 * std::max(1.0, t));
}

TEST(Shifts, ThetaNondecreasingWithExactAnchors) {
  for (const auto& e : builtin_catalog()) {
    ThetaTable theta(e.sys);
    double prev = -1.0;
    for (double t : e.ts.sample(e.sys.t0(), e.ts.max(), 200)) {
      if (t < e.sys.t0() || !e.sys.in_star(t)) continue;
      const double th = theta.theta(t);
      EXPECT_GE(th, prev - 1e-12) << e.name << " t=" << t;
      prev = th;
    }
    double sum = 0.0;
    for (std::size_t k = 1; k <= 5; ++k) {
      sum += theta.increment(k);
      EXPECT_EQ(theta.theta(theta.anchor(k)), theta.anchor_theta(k)) << e.name;
      EXPECT_NEAR(theta.anchor_theta(k), sum, 1e-12 * std::max(1.0, sum)) << e.name;
      EXPECT_GT(theta.increment(k), 0.0) << e.name;
    }
  }
}

TEST(Shifts, ThetaDerivativeMatchesDifferenceQuotient) {
  ThetaTable theta(ShiftSystem::multiplicative(3));
  for (double t : {1.2, 1.7, 3.5, 5.0}) {
    const double h = 1e-6;
    const double fd = (theta.theta(t + h) - theta.theta(t - h)) / (2 * h);
    EXPECT_NEAR(theta.theta_derivative(t), fd, 1e-6);
  }
  // Right derivative at an anchor uses the next period.
  EXPECT_NEAR(theta.theta_derivative(3.0), 9.0 / 9.0, 1e-12);
}

TEST(Shifts, ShiftDeltaDerivative) {
  const auto ts = TimeScaleWindow::geometric_union(3, 2, 1, 300);
  const auto sys = ShiftSystem::multiplicative(3);
  EXPECT_EQ(shift_delta_derivative(sys, ts, ShiftDirection::Forward, 3, 1.5), 3.0);
  const auto additive = ShiftSystem::additive(2);
  EXPECT_EQ(shift_delta_derivative(additive, TimeScaleWindow::integer(0, 10),
                                   ShiftDirection::Forward, 2, 4), 1.0);
  for (const auto& e : builtin_catalog()) {
    for (double t : periodicity_samples(e.sys, e.ts, 30)) {
      if (e.ts.jump(t).window_edge) continue;
      EXPECT_GT(shift_delta_derivative(e.sys, e.ts, ShiftDirection::Forward, e.sys.period(), t), 0.0)
          << e.name << " t=" << t;
    }
  }
  EXPECT_EQ(code_of([&] {
              (void)shift_delta_derivative(sys, ts, ShiftDirection::Forward, 3, ts.max());
            }),
            ErrorCode::WindowEdge);
}

TEST(Shifts, NumericShiftDerivativeForSqrt) {
  const auto ts = TimeScaleWindow::sqrt_naturals(0, 20);
  const auto sys = ShiftSystem::sqrt_shift(2);
  // Delta derivative of t -> sqrt(t^2 + 4) between sqrt(n) and sqrt(n+1).
  const double t = std::sqrt(5.0), s = std::sqrt(6.0);
  const double expect = (std::sqrt(6.0 + 4) - std::sqrt(5.0 + 4)) / (s - t);
  EXPECT_NEAR(shift_delta_derivative(sys, ts, ShiftDirection::Forward, 2, t), expect, 1e-12);
}

TEST(Shifts, DeltaFunctionOnQScale) {
  const auto ts = TimeScaleWindow::q_scale(2, 1.0 / 64, 4096);
  const auto sys = ShiftSystem::multiplicative(2);
  const auto report = verify_periodicity(sys, ts, PeriodicityMode::DeltaFunction,
                                         periodicity_samples(sys, ts, 50),
                                         [](double t) { return 1.0 / t; });
  EXPECT_TRUE(report.pass);
  EXPECT_GT(report.checked, 0u);
}

TEST(Shifts, LogPeriodicFunctionOnReals) {
  const auto ts = TimeScaleWindow::real(-1000, 1000);
  const auto sys = ShiftSystem::multiplicative(4);
  auto f = [](double t) { return std::sin(std::numbers::pi * std::log(std::abs(t)) / std::log(0.5)); };
  const auto report = verify_periodicity(sys, ts, PeriodicityMode::Function,
                                         periodicity_samples(sys, ts, 200), f);
  EXPECT_TRUE(report.pass);
  EXPECT_GT(report.checked, 100u);
}

TEST(Shifts, NonPeriodizableScaleFails) {
  const TimeScaleWindow ts({{-20, 0}, {1, 20}});
  for (double T : {0.5, 1.0, 2.0, 3.0}) {
    const auto sys = ShiftSystem::additive(T);
    const auto report =
        verify_periodicity(sys, ts, PeriodicityMode::Scale, periodicity_samples(sys, ts, 200));
    EXPECT_FALSE(report.pass) << T;
    EXPECT_FALSE(report.violations.empty());
  }
}

TEST(Shifts, FunctionModeFailsForNonPeriodicFunction) {
  const auto ts = TimeScaleWindow::q_scale(2, 1, 1024);
  const auto sys = ShiftSystem::multiplicative(2);
  const auto report = verify_periodicity(sys, ts, PeriodicityMode::Function,
                                         periodicity_samples(sys, ts, 20),
                                         [](double t) { return t; });
  EXPECT_FALSE(report.pass);
}

TEST(Shifts, UndefinedValuesAreViolations) {
  const auto ts = TimeScaleWindow::integer(-5, 5);
  const auto sys = ShiftSystem::additive(1);
  const Expr inv = Expr::parse("1/t");
  const auto report = verify_periodicity(sys, ts, PeriodicityMode::DeltaFunction,
                                         periodicity_samples(sys, ts, 20), inv.bind({}));
  EXPECT_FALSE(report.pass);
}

TEST(Shifts, CatalogPassesAllModes) {
  for (const auto& e : builtin_catalog()) {
    const auto samples = periodicity_samples(e.sys, e.ts, 150);
    for (auto mode : {PeriodicityMode::Scale, PeriodicityMode::Axioms}) {
      const auto r = verify_periodicity(e.sys, e.ts, mode, samples);
      EXPECT_TRUE(r.pass) << e.name << " " << (r.violations.empty() ? "" : r.violations[0].check)
                          << " at s=" << (r.violations.empty() ? 0 : r.violations[0].s)
                          << " t=" << (r.violations.empty() ? 0 : r.violations[0].t);
      EXPECT_GT(r.checked, 0u) << e.name;
    }
  }
}

TEST(Shifts, RoundTripAndSigmaCommutation) {
  for (const auto& e : builtin_catalog()) {
    const double T = e.sys.period();
    for (double t : periodicity_samples(e.sys, e.ts, 100)) {
      for (auto d : {ShiftDirection::Forward, ShiftDirection::Backward}) {
        const auto o = d == ShiftDirection::Forward ? ShiftDirection::Backward : ShiftDirection::Forward;
        if (!e.sys.in_domain(d, T, t)) continue;
        const double u = e.sys.shift(d, T, t);
        if (!e.ts.contains(u)) continue;
        EXPECT_NEAR(e.sys.shift(o, T, u), t, 1e-10 * std::max(1.0, std::abs(t))) << e.name;
        if (e.ts.jump(t).window_edge || !e.ts.contains(u) || e.ts.jump(u).window_edge) continue;
        const double lhs = e.sys.shift(d, T, e.ts.sigma(t));
        EXPECT_NEAR(lhs, e.ts.sigma(u), 1e-10 * std::max(1.0, std::abs(lhs))) << e.name << " t=" << t;
      }
      if (t >= e.sys.t0()) {
        if (e.sys.in_domain(ShiftDirection::Backward, t, t)) {
          EXPECT_NEAR(e.sys.backward(t, t), e.sys.t0(), 1e-10 * std::max(1.0, std::abs(t))) << e.name;
        }
        EXPECT_NEAR(e.sys.backward(e.sys.t0(), t), t, 1e-10 * std::max(1.0, std::abs(t))) << e.name;
      }
    }
  }
}

TEST(Shifts, DeltaPeriodicIntegralInvariance) {
  const auto ts = TimeScaleWindow::geometric_union(3, 2, 1, 3 * 243);
  const auto sys = ShiftSystem::multiplicative(3);
  auto f = [](double t) { return std::cos(2 * std::numbers::pi * std::log(t) / std::log(3.0)) / t; };
  ASSERT_TRUE(verify_periodicity(sys, ts, PeriodicityMode::DeltaFunction,
                                 periodicity_samples(sys, ts, 60), f)
                  .pass);
  for (double t : {1.5, 2.0, 3.0, 4.5, 5.5}) {
    const double lhs = delta_integral(f, ts, 1, t);
    const double rhs = delta_integral(f, ts, sys.advance(1), sys.advance(t));
    EXPECT_NEAR(lhs, rhs, 2e-10 * std::max(1.0, std::abs(lhs))) << t;
  }
}

TEST(Shifts, CustomShiftMatchesBuiltin) {
  const auto custom = ShiftSystem::custom(1, 2, Expr::parse("s*t"), Expr::parse("t/s"));
  const auto builtin = ShiftSystem::multiplicative(2);
  const auto ts = TimeScaleWindow::q_scale(2, 1, 1024);
  ThetaTable a(custom), b(builtin);
  for (double t : {1.0, 2.0, 8.0, 64.0}) {
    EXPECT_DOUBLE_EQ(custom.forward(2, t), builtin.forward(2, t));
    EXPECT_NEAR(a.theta(t), b.theta(t), 1e-12);
  }
  EXPECT_TRUE(verify_periodicity(custom, ts, PeriodicityMode::Axioms, periodicity_samples(custom, ts, 11)).pass);
  // No closed-form derivative: falls back to differencing along the scale.
  EXPECT_FALSE(custom.has_analytic_derivative());
  EXPECT_DOUBLE_EQ(shift_delta_derivative(custom, ts, ShiftDirection::Forward, 2, 4), 2.0);
}

TEST(Shifts, SignedSquaresFormulaIsNotMonotoneForNegativeTimes) {
  // The published maps send -n^2 to -(n+1)^2 under the forward shift, which
  // moves left. The axioms check exposes this on the negative half.
  const auto sys = ShiftSystem::signed_squares(1);
  EXPECT_DOUBLE_EQ(sys.forward(1, 4), 9.0);
  EXPECT_DOUBLE_EQ(sys.forward(1, -4), -9.0);
  const auto ts = TimeScaleWindow::signed_squares(-400, 400);
  const auto r = verify_periodicity(sys, ts, PeriodicityMode::Axioms, periodicity_samples(sys, ts, 80));
  EXPECT_FALSE(r.pass);
}
