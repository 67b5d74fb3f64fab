#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "tsfloquet/floquet.hpp"
#include "tsfloquet/stability.hpp"

using namespace tsfloquet;

namespace {

MatrixFunction coupled_integer_system() {
  return MatrixFunction::from_exprs({{Expr::parse("0.1*cos(pi*t/2)"), Expr::parse("1")},
                                     {Expr::parse("-0.5"), Expr::parse("0.2")}});
}

MatrixFunction coupled_scale_system() {
  return MatrixFunction::from_exprs({{Expr::parse("0.2/t"), Expr::parse("1/t")},
                                     {Expr::parse("-1/t"), Expr::parse("0")}});
}

Matrix random_matrix(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Matrix M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = Complex(dist(rng), dist(rng));
  }
  return M + static_cast<double>(n) * Matrix::Identity(n, n);
}

void BM_TransitionInteger(benchmark::State& state) {
  const auto A = coupled_integer_system();
  const auto ts = TimeScaleWindow::integer(0, 10'000);
  const auto steps = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(transition_matrix(A, ts, steps, 0.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TransitionInteger)->Arg(64)->Arg(512)->Arg(4096);

void BM_TransitionQScale(benchmark::State& state) {
  const auto A = coupled_scale_system();
  const auto ts = TimeScaleWindow::q_scale(2, 1, std::pow(2.0, 40));
  const double t = std::pow(2.0, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(transition_matrix(A, ts, t, 1.0));
}
BENCHMARK(BM_TransitionQScale)->Arg(8)->Arg(32);

void BM_TransitionMixed(benchmark::State& state) {
  const auto A = coupled_scale_system();
  const auto ts = TimeScaleWindow::geometric_union(3, 2, 1, 3 * 243);
  for (auto _ : state) benchmark::DoNotOptimize(transition_matrix(A, ts, 243.0, 1.0));
}
BENCHMARK(BM_TransitionMixed);

void BM_SpectralDecompose(benchmark::State& state) {
  const Matrix M = random_matrix(state.range(0), 7);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(M));
}
BENCHMARK(BM_SpectralDecompose)->Arg(2)->Arg(4)->Arg(8);

void BM_RealPower(benchmark::State& state) {
  const SpectralData s = spectral_decompose(random_matrix(state.range(0), 11));
  double r = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(real_power(s, r));
    r += 0.001;
  }
}
BENCHMARK(BM_RealPower)->Arg(2)->Arg(4)->Arg(8);

void BM_FloquetBuild(benchmark::State& state) {
  const auto A = coupled_scale_system();
  const auto ts = TimeScaleWindow::geometric_union(3, 2, 1, 3 * 243);
  const auto sys = ShiftSystem::multiplicative(3);
  for (auto _ : state) {
    FloquetDecomposition dec(A, ts, sys);
    benchmark::DoNotOptimize(dec.log_monodromy());
  }
}
BENCHMARK(BM_FloquetBuild);

void BM_FloquetL(benchmark::State& state) {
  const FloquetDecomposition dec(coupled_integer_system(), TimeScaleWindow::integer(0, 400),
                                 ShiftSystem::additive(4));
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dec.L(t));
    t = t >= 399.0 ? 0.0 : t + 1.0;
  }
}
BENCHMARK(BM_FloquetL);

void BM_Classify(benchmark::State& state) {
  const FloquetDecomposition dec(coupled_integer_system(), TimeScaleWindow::integer(0, 400),
                                 ShiftSystem::additive(4));
  StabilityOptions opts;
  opts.horizon = 0.0;
  opts.t_max = 400.0;
  opts.samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(classify(dec, opts));
}
BENCHMARK(BM_Classify)->Arg(50)->Arg(200);

void BM_ExprParse(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(Expr::parse("0.1*cos(2*pi*ln(t)/ln(4))/t + a^2 - sqrt(abs(t))"));
  }
}
BENCHMARK(BM_ExprParse);

void BM_ExprEval(benchmark::State& state) {
  const Expr e = Expr::parse("0.1*cos(2*pi*ln(t)/ln(4))/t + a^2 - sqrt(abs(t))");
  const ParamMap params{{"a", 0.5}};
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(e.eval(t, params));
    t += 1e-3;
  }
}
BENCHMARK(BM_ExprEval);

}  // namespace

BENCHMARK_MAIN();
