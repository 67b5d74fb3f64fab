#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tsfloquet/expr.hpp"
#include "tsfloquet/timescale.hpp"

namespace tsfloquet {

/// t -> rows x cols complex matrix. Square for system matrices, a single
/// column for forcing terms.
class MatrixFunction {
 public:
  using Eval = std::function<Matrix(double)>;

  MatrixFunction(Eigen::Index rows, Eigen::Index cols, Eval eval);

  static MatrixFunction from_exprs(const std::vector<std::vector<Expr>>& entries,
                                   ParamMap params = {});
  static MatrixFunction column_from_exprs(const std::vector<Expr>& entries, ParamMap params = {});
  static MatrixFunction constant(Matrix value);
  static MatrixFunction zero(Eigen::Index rows, Eigen::Index cols);

  [[nodiscard]] Eigen::Index rows() const noexcept { return rows_; }
  [[nodiscard]] Eigen::Index cols() const noexcept { return cols_; }

  /// Evaluates and rejects non-finite entries.
  Matrix operator()(double t) const;

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  Eval eval_;
};

struct TransitionOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_steps = 2'000'000;
  /// |det(I + mu A)| must exceed this at every scattered point.
  double regressivity_tol = 1e-12;
};

/// Dormand-Prince 5(4) on Y' = f(t, Y) over [a, b].
Matrix integrate_rk45(const std::function<Matrix(double, const Matrix&)>& rhs, double a, double b,
                      Matrix y, const TransitionOptions& opts);

/// Solves Y^Delta = A Y (+ F) forward from `from` to `to` (from <= to),
/// Y(from) = y0: exact (I + mu A) jumps at scattered points, RK45 on dense
/// segments.
Matrix propagate(const MatrixFunction& A, const TimeScaleWindow& ts, double from, double to,
                 Matrix y0, const TransitionOptions& opts = {},
                 const MatrixFunction* forcing = nullptr);

/// Phi_A(t, t0). Backward requests invert the forward product.
Matrix transition_matrix(const MatrixFunction& A, const TimeScaleWindow& ts, double t, double t0,
                         const TransitionOptions& opts = {});

/// Phi_A(t_k, t0) for ascending times t_k >= t0, reusing the running product.
std::vector<Matrix> transition_path(const MatrixFunction& A, const TimeScaleWindow& ts, double t0,
                                    std::span<const double> times,
                                    const TransitionOptions& opts = {});

struct PeanoBakerOptions {
  /// Grid density on dense segments; each segment gets at least 64 steps.
  double steps_per_unit = 2048.0;
};

/// Truncated Peano-Baker series I + int A + int A int A + ... up to `order`
/// nested delta-integrals, evaluated on a grid independent of the RK engine.
Matrix peano_baker(const MatrixFunction& A, const TimeScaleWindow& ts, double t, double t0,
                   int order, const PeanoBakerOptions& opts = {});

/// Solution of y^Delta = A y + F, y(t0) = x0, at t >= t0.
Vector variation_of_constants(const MatrixFunction& A, const MatrixFunction& F,
                              const TimeScaleWindow& ts, double t, double t0, const Vector& x0,
                              const TransitionOptions& opts = {});

}  // namespace tsfloquet
