#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "tsfloquet/expr.hpp"

using namespace tsfloquet;

namespace {

template <class T>
const T& as(const ExprNode& n) {
  return std::get<T>(n.data);
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

TEST(Expr, ParsesDivision) {
  const Expr e = Expr::parse("1/t");
  const auto& div = as<BinaryNode>(e.root());
  EXPECT_EQ(div.op, BinaryOp::Div);
  EXPECT_EQ(as<NumberNode>(*div.lhs).value, 1.0);
  EXPECT_EQ(as<VariableNode>(*div.rhs).name, "t");
}

TEST(Expr, ParsesCosineEntry) {
  const Expr e = Expr::parse("(1/t)*cos(pi*ln(t)/ln(q))");
  const auto& mul = as<BinaryNode>(e.root());
  EXPECT_EQ(mul.op, BinaryOp::Mul);
  const auto& call = as<CallNode>(*mul.rhs);
  EXPECT_EQ(call.fn, Function::Cos);
  const auto& ratio = as<BinaryNode>(*call.arg);
  EXPECT_EQ(ratio.op, BinaryOp::Div);
  EXPECT_EQ(as<CallNode>(*ratio.rhs).fn, Function::Ln);
  EXPECT_EQ(as<VariableNode>(*as<CallNode>(*ratio.rhs).arg).name, "q");
  const auto& inner = as<BinaryNode>(*ratio.lhs);
  EXPECT_EQ(as<ConstantNode>(*inner.lhs).name, "pi");
  EXPECT_EQ(e.variables(), (std::set<std::string>{"q", "t"}));
}

TEST(Expr, SyntaxErrorPosition) {
  try {
    (void)Expr::parse("2*");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 2u);
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(Expr, SyntaxErrors) {
  for (const char* bad : {"", "(", "1+", ")", "1 2", "sin", "sin(", "t^", "3..4", "*2"}) {
    EXPECT_EQ(code_of([&] { (void)Expr::parse(bad); }), ErrorCode::SyntaxError) << bad;
  }
}

TEST(Expr, UnknownFunction) {
  EXPECT_EQ(code_of([] { (void)Expr::parse("log(t)"); }), ErrorCode::UnknownFunction);
}

TEST(Expr, Evaluates) {
  EXPECT_EQ(Expr::parse("1/t").eval(2.0), 0.5);
  EXPECT_NEAR(Expr::parse("cos(pi*ln(t)/ln(q))").eval(2.0, {{"q", 2.0}}), -1.0, 1e-15);
  EXPECT_EQ(Expr::parse("2^3^2").eval(0), 512.0);
  EXPECT_EQ(Expr::parse("-2^2").eval(0), -4.0);
  EXPECT_EQ(Expr::parse("2*-3").eval(0), -6.0);
  EXPECT_EQ(Expr::parse("10 - 4 - 3").eval(0), 3.0);
  EXPECT_EQ(Expr::parse("floor(t) + abs(-t)").eval(2.5), 4.5);
  EXPECT_DOUBLE_EQ(Expr::parse("e").eval(0), std::numbers::e);
  EXPECT_DOUBLE_EQ(Expr::parse("sqrt(t)*exp(0)+tan(0)+sin(0)").eval(9), 3.0);
  EXPECT_DOUBLE_EQ(Expr::parse("1.5e1 + .5").eval(0), 15.5);
}

TEST(Expr, DomainErrors) {
  EXPECT_EQ(code_of([] { (void)Expr::parse("ln(t)").eval(-1.0); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { (void)Expr::parse("sqrt(t)").eval(-1.0); }), ErrorCode::DomainError);
  EXPECT_EQ(code_of([] { (void)Expr::parse("1/t").eval(0.0); }), ErrorCode::DomainError);
}

TEST(Expr, UnboundVariable) {
  EXPECT_EQ(code_of([] { (void)Expr::parse("q*t").eval(1.0); }), ErrorCode::UnboundVariable);
}

TEST(Expr, PrintParseRoundTrip) {
  for (const char* src : {"1/t", "(1/t)*cos(pi*ln(t)/ln(q))", "-t^2^-1", "a - (b - c)",
                          "2^(1/3) * e", "floor(-t / 3.25e-2)", "-(-t)"}) {
    const Expr e = Expr::parse(src);
    const Expr again = Expr::parse(e.to_string());
    EXPECT_EQ(e, again) << src << " -> " << e.to_string();
  }
}

TEST(Expr, DeterministicEvaluation) {
  const Expr e = Expr::parse("sin(t)^2 + cos(t)*exp(-t)/sqrt(t+1)");
  for (double t : {0.1, 1.7, 42.0}) EXPECT_EQ(e.eval(t), e.eval(t));
}

TEST(Expr, AlgebraicIdentities) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(0.1, 10.0);
  const Expr a = Expr::parse("ln(t)*t");
  const Expr b = Expr::parse("cos(t)/t");
  const Expr sum = Expr::parse("ln(t)*t + cos(t)/t");
  const Expr pow1 = Expr::parse("(ln(t)*t)^1");
  for (int i = 0; i < 100; ++i) {
    const double t = dist(rng);
    const double expect = a.eval(t) + b.eval(t);
    EXPECT_NEAR(sum.eval(t), expect, 4 * std::numeric_limits<double>::epsilon() * std::abs(expect) + 1e-300);
    EXPECT_DOUBLE_EQ(pow1.eval(t), a.eval(t));
  }
}

TEST(Expr, BindCapturesParameters) {
  const ScalarFn f = Expr::parse("q*t").bind({{"q", 3.0}});
  EXPECT_EQ(f(2.0), 6.0);
}
