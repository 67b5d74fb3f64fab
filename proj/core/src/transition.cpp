#include "tsfloquet/transition.hpp"

#include <algorithm>
#include <cmath>

namespace tsfloquet {

MatrixFunction::MatrixFunction(Eigen::Index rows, Eigen::Index cols, Eval eval)
    : rows_(rows), cols_(cols), eval_(std::move(eval)) {}

MatrixFunction MatrixFunction::from_exprs(const std::vector<std::vector<Expr>>& entries,
                                          ParamMap params) {
  const auto rows = static_cast<Eigen::Index>(entries.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(entries.front().size());
  for (const auto& row : entries) {
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::ConfigError, "ragged matrix of expressions");
    }
  }
  return MatrixFunction(rows, cols, [entries, params = std::move(params), rows, cols](double t) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        m(i, j) = entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(t, params);
      }
    }
    return m;
  });
}

MatrixFunction MatrixFunction::column_from_exprs(const std::vector<Expr>& entries,
                                                 ParamMap params) {
  std::vector<std::vector<Expr>> rows;
  for (const auto& e : entries) rows.push_back({e});
  return from_exprs(rows, std::move(params));
}

MatrixFunction MatrixFunction::constant(Matrix value) {
  const auto r = value.rows(), c = value.cols();
  return MatrixFunction(r, c, [value = std::move(value)](double) { return value; });
}

MatrixFunction MatrixFunction::zero(Eigen::Index rows, Eigen::Index cols) {
  return constant(Matrix::Zero(rows, cols));
}

Matrix MatrixFunction::operator()(double t) const {
  Matrix m = eval_(t);
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "matrix function at t=" + std::to_string(t));
  }
  return m;
}

// --------------------------------------------------------------------------
// Dormand-Prince 5(4)

Matrix integrate_rk45(const std::function<Matrix(double, const Matrix&)>& rhs, double a, double b,
                      Matrix y, const TransitionOptions& opts) {
  if (!(b > a)) return y;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double t = a;
  double h = std::min(b - a, std::max(1e-3 * (b - a), 1e-8));
  Matrix k1 = rhs(t, y);
  std::size_t steps = 0;
  while (t < b) {
    if (++steps > opts.max_steps) {
      throw Error(ErrorCode::IntegrationFailure,
                  "step budget exhausted at t=" + std::to_string(t));
    }
    bool last = false;
    if (t + h >= b || b - (t + h) < 1e-12 * std::max(1.0, std::abs(b))) {
      h = b - t;
      last = true;
    }
    const Matrix k2 = rhs(t + c2 * h, y + h * (a21 * k1));
    const Matrix k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Matrix k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Matrix k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double t_end = last ? b : t + h;
    const Matrix k6 =
        rhs(t_end, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Matrix y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Matrix k7 = rhs(t_end, y_new);
    const Matrix err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double norm = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double scale =
          opts.abs_tol + opts.rel_tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
      norm = std::max(norm, std::abs(err(i)) / scale);
    }
    if (!std::isfinite(norm)) {
      throw Error(ErrorCode::IntegrationFailure, "non-finite state near t=" + std::to_string(t));
    }
    if (norm <= 1.0) {
      t = t_end;
      y = std::move(y_new);
      k1 = k7;
      if (last) break;
    }
    const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw Error(ErrorCode::IntegrationFailure, "step size underflow at t=" + std::to_string(t));
    }
  }
  return y;
}

// --------------------------------------------------------------------------

namespace {

Matrix jump_factor(const MatrixFunction& A, double s, double mu, const TransitionOptions& opts) {
  const Matrix a = A(s);
  Matrix step = Matrix::Identity(a.rows(), a.cols()) + mu * a;
  if (std::abs(step.determinant()) <= opts.regressivity_tol) {
    throw Error(ErrorCode::RegressivityViolation,
                "det(I + mu A) vanishes at t=" + std::to_string(s));
  }
  return step;
}

}  // namespace

Matrix propagate(const MatrixFunction& A, const TimeScaleWindow& ts, double from, double to,
                 Matrix y0, const TransitionOptions& opts, const MatrixFunction* forcing) {
  if (from > to + snap_at(to, ts.snap())) {
    throw Error(ErrorCode::ReversedBounds, "propagate expects from <= to");
  }
  Matrix y = std::move(y0);
  for (const Piece& p : ts.pieces(from, to)) {
    if (p.dense()) {
      if (forcing != nullptr) {
        y = integrate_rk45([&](double x, const Matrix& v) -> Matrix { return A(x) * v + (*forcing)(x); },
                           p.lo, p.hi, std::move(y), opts);
      } else {
        y = integrate_rk45([&](double x, const Matrix& v) -> Matrix { return A(x) * v; }, p.lo,
                           p.hi, std::move(y), opts);
      }
    } else {
      const Matrix step = jump_factor(A, p.lo, p.mu, opts);
      Matrix next = step * y;
      if (forcing != nullptr) next += p.mu * (*forcing)(p.lo);
      y = std::move(next);
    }
  }
  return y;
}

Matrix transition_matrix(const MatrixFunction& A, const TimeScaleWindow& ts, double t, double t0,
                         const TransitionOptions& opts) {
  const Matrix I = Matrix::Identity(A.rows(), A.rows());
  if (std::abs(t - t0) <= snap_at(t, ts.snap())) return I;
  if (t > t0) return propagate(A, ts, t0, t, I, opts);
  const Matrix forward = propagate(A, ts, t, t0, I, opts);
  Eigen::PartialPivLU<Matrix> lu(forward);
  return lu.inverse();
}

std::vector<Matrix> transition_path(const MatrixFunction& A, const TimeScaleWindow& ts, double t0,
                                    std::span<const double> times,
                                    const TransitionOptions& opts) {
  std::vector<Matrix> out;
  out.reserve(times.size());
  Matrix running = Matrix::Identity(A.rows(), A.rows());
  double at = t0;
  for (double t : times) {
    if (t < at - snap_at(t, ts.snap())) {
      throw Error(ErrorCode::ReversedBounds, "transition_path needs ascending times >= t0");
    }
    if (t > at) {
      running = propagate(A, ts, at, t, std::move(running), opts);
      at = t;
    }
    out.push_back(running);
  }
  return out;
}

// --------------------------------------------------------------------------
// Peano-Baker oracle

Matrix peano_baker(const MatrixFunction& A, const TimeScaleWindow& ts, double t, double t0,
                   int order, const PeanoBakerOptions& opts) {
  const Eigen::Index n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  if (t < t0) throw Error(ErrorCode::ReversedBounds, "peano_baker needs t >= t0");
  if (order <= 0 || std::abs(t - t0) <= snap_at(t, ts.snap())) return I;

  struct Block {
    bool dense;
    std::vector<double> nodes;
    double mu = 0.0;
    std::vector<Matrix> a;
  };
  std::vector<Block> blocks;
  for (const Piece& p : ts.pieces(t0, t)) {
    Block b;
    b.dense = p.dense();
    if (p.dense()) {
      auto steps = static_cast<std::size_t>(std::ceil((p.hi - p.lo) * opts.steps_per_unit));
      steps = std::max<std::size_t>(64, steps + (steps % 2));
      for (std::size_t j = 0; j <= steps; ++j) {
        b.nodes.push_back(j == steps ? p.hi
                                     : p.lo + (p.hi - p.lo) * static_cast<double>(j) /
                                                  static_cast<double>(steps));
      }
    } else {
      b.nodes.push_back(p.lo);
      b.mu = p.mu;
    }
    for (double x : b.nodes) b.a.push_back(A(x));
    blocks.push_back(std::move(b));
  }

  // prev[b][j]: previous iterate at each node; the running term ends at t.
  std::vector<std::vector<Matrix>> prev(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) prev[b].assign(blocks[b].nodes.size(), I);
  Matrix total = I;
  std::vector<std::vector<Matrix>> cur(blocks.size());
  for (int k = 1; k <= order; ++k) {
    Matrix running = Matrix::Zero(n, n);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const Block& blk = blocks[b];
      auto& out = cur[b];
      out.assign(blk.nodes.size(), Matrix::Zero(n, n));
      if (!blk.dense) {
        out[0] = running;
        running += blk.mu * (blk.a[0] * prev[b][0]);
        continue;
      }
      const std::size_t N = blk.nodes.size() - 1;
      const double h = (blk.nodes.back() - blk.nodes.front()) / static_cast<double>(N);
      std::vector<Matrix> g(N + 1);
      for (std::size_t j = 0; j <= N; ++j) g[j] = blk.a[j] * prev[b][j];
      out[0] = running;
      for (std::size_t j = 0; j < N; ++j) {
        // Quadratic-interpolation increment, exact for quadratic integrands.
        Matrix inc = (j + 2 <= N) ? Matrix((5.0 * g[j] + 8.0 * g[j + 1] - g[j + 2]) * (h / 12.0))
                                  : Matrix((-g[j - 1] + 8.0 * g[j] + 5.0 * g[j + 1]) * (h / 12.0));
        running += inc;
        out[j + 1] = running;
      }
    }
    total += running;
    std::swap(prev, cur);
  }
  return total;
}

Vector variation_of_constants(const MatrixFunction& A, const MatrixFunction& F,
                              const TimeScaleWindow& ts, double t, double t0, const Vector& x0,
                              const TransitionOptions& opts) {
  if (t < t0 - snap_at(t, ts.snap())) {
    throw Error(ErrorCode::ReversedBounds, "variation_of_constants needs t >= t0");
  }
  Matrix y = propagate(A, ts, t0, t, Matrix(x0), opts, &F);
  return y.col(0);
}

}  // namespace tsfloquet
