#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "tsfloquet/errors.hpp"
#include "tsfloquet/types.hpp"

namespace tsfloquet {

/// Closed interval [lo, hi] of a time scale; lo == hi encodes an isolated point.
struct TimeCell {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool isolated() const noexcept { return lo == hi; }
};

enum class PointClass { RightDense, RightScattered };

struct JumpInfo {
  double sigma = 0.0;
  double mu = 0.0;
  PointClass cls = PointClass::RightDense;
  /// Set when t is the window maximum; sigma is clamped to t there.
  bool window_edge = false;
};

/// One time-ordered piece of a half-open range [a, b) of the scale: a dense
/// segment [lo, hi] (mu == 0) or a right-scattered point lo == hi with mu > 0.
struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  double mu = 0.0;

  [[nodiscard]] bool dense() const noexcept { return mu == 0.0; }
};

/// A bounded window of a time scale, stored as ordered disjoint closed cells.
/// Immutable after construction.
class TimeScaleWindow {
 public:
  explicit TimeScaleWindow(std::vector<TimeCell> cells, std::string name = "explicit",
                           std::map<std::string, double> params = {}, double snap = kSnap);

  static TimeScaleWindow real(double lo, double hi);
  static TimeScaleWindow integer(double lo, double hi);
  /// Points q^k inside [lo, hi], q > 1, lo > 0.
  static TimeScaleWindow q_scale(double q, double lo, double hi);
  /// Cells [q^k, c q^k] whose left end lies in [lo, hi]; 1 < c < q.
  static TimeScaleWindow geometric_union(double q, double c, double lo, double hi);
  /// Points sqrt(n) inside [lo, hi].
  static TimeScaleWindow sqrt_naturals(double lo, double hi);
  /// Points +-n^2 inside [lo, hi].
  static TimeScaleWindow signed_squares(double lo, double hi);
  /// Points q^n / (1 + q^n) for n in [n_min, n_max].
  static TimeScaleWindow logistic(double q, int n_min, int n_max);

  [[nodiscard]] const std::vector<TimeCell>& cells() const noexcept { return cells_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::map<std::string, double>& params() const noexcept { return params_; }
  [[nodiscard]] double snap() const noexcept { return snap_; }
  [[nodiscard]] double min() const noexcept { return cells_.front().lo; }
  [[nodiscard]] double max() const noexcept { return cells_.back().hi; }

  [[nodiscard]] bool contains(double t) const;
  [[nodiscard]] std::optional<std::size_t> locate(double t) const;

  /// sigma, mu and the right-dense / right-scattered class of t.
  [[nodiscard]] JumpInfo jump(double t) const;
  [[nodiscard]] double sigma(double t) const { return jump(t).sigma; }
  [[nodiscard]] double mu(double t) const { return jump(t).mu; }
  [[nodiscard]] double rho(double t) const;

  /// Time-ordered decomposition of [a, b) into dense segments and scattered points.
  [[nodiscard]] std::vector<Piece> pieces(double a, double b) const;

  /// Deterministic sample of [a, b] ∩ window, window maximum excluded. Every
  /// cell endpoint is taken first (thinned evenly if there are too many), the
  /// remaining budget is spread uniformly over dense segments.
  [[nodiscard]] std::vector<double> sample(double a, double b, std::size_t count) const;

  /// Same point snapped onto the exact cell endpoint when within tolerance.
  [[nodiscard]] double snap_point(double t) const;

 private:
  void require_member(double t, const char* op) const;

  std::vector<TimeCell> cells_;
  std::string name_;
  std::map<std::string, double> params_;
  double snap_;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  std::size_t max_evals = std::size_t{1} << 20;
};

namespace detail {

inline double value_norm(double v) { return std::abs(v); }
inline double value_norm(const Complex& v) { return std::abs(v); }
template <class Derived>
double value_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline bool value_finite(double v) { return std::isfinite(v); }
inline bool value_finite(const Complex& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}
template <class Derived>
bool value_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

template <class F>
using value_t = std::decay_t<std::invoke_result_t<F&, double>>;

/// Adaptive composite Simpson over [a, b] with Richardson correction.
template <class F>
value_t<F> adaptive_simpson(F& f, double a, double b, const QuadratureOptions& opts,
                            std::size_t& evals) {
  using V = value_t<F>;
  struct Panel {
    double a, b;
    V fa, fm, fb, whole;
    double eps;
    int depth;
  };
  auto eval = [&](double x) -> V {
    if (++evals > opts.max_evals) {
      throw Error(ErrorCode::QuadratureFailure,
                  "evaluation budget exhausted on [" + std::to_string(a) + ", " +
                      std::to_string(b) + "]");
    }
    V v = f(x);
    if (!value_finite(v)) {
      throw Error(ErrorCode::NonFiniteValue, "integrand at t=" + std::to_string(x));
    }
    return v;
  };

  constexpr int kInitial = 8;
  const double width = (b - a) / kInitial;
  std::vector<Panel> stack;
  stack.reserve(64);
  double scale = 0.0;
  V fl = eval(a);
  for (int i = 0; i < kInitial; ++i) {
    const double pa = a + i * width;
    const double pb = (i + 1 == kInitial) ? b : a + (i + 1) * width;
    V fm = eval(0.5 * (pa + pb));
    V fr = eval(pb);
    V whole = (fl + 4.0 * fm + fr) * ((pb - pa) / 6.0);
    scale += (value_norm(fl) + 4.0 * value_norm(fm) + value_norm(fr)) * ((pb - pa) / 6.0);
    stack.push_back(Panel{pa, pb, fl, fm, fr, whole, 0.0, 0});
    fl = fr;
  }
  const double eps_total = std::max(opts.rel_tol * scale, opts.abs_tol);
  for (auto& p : stack) p.eps = eps_total / kInitial;

  V acc = stack.front().whole * 0.0;
  while (!stack.empty()) {
    Panel p = std::move(stack.back());
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    V flm = eval(0.5 * (p.a + m));
    V frm = eval(0.5 * (m + p.b));
    V left = (p.fa + 4.0 * flm + p.fm) * ((m - p.a) / 6.0);
    V right = (p.fm + 4.0 * frm + p.fb) * ((p.b - m) / 6.0);
    V both = left + right;
    const double err = value_norm(V(both - p.whole));
    const bool tiny = (p.b - p.a) <= 1e-13 * std::max(1.0, std::abs(m));
    if (err <= 15.0 * p.eps || tiny || p.depth > 60) {
      acc = acc + both + (both - p.whole) * (1.0 / 15.0);
      continue;
    }
    stack.push_back(Panel{m, p.b, p.fm, frm, p.fb, right, 0.5 * p.eps, p.depth + 1});
    stack.push_back(Panel{p.a, m, p.fa, flm, p.fm, left, 0.5 * p.eps, p.depth + 1});
  }
  return acc;
}

}  // namespace detail

/// Delta-integral of f over [a, b): exact graininess-weighted sum over the
/// right-scattered points plus adaptive Simpson over dense segments.
template <class F>
detail::value_t<F> delta_integral(F&& f, const TimeScaleWindow& ts, double a, double b,
                                  const QuadratureOptions& opts = {}) {
  if (a > b + snap_at(b, ts.snap())) {
    throw Error(ErrorCode::ReversedBounds,
                "delta_integral over [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  using V = detail::value_t<F>;
  const auto pieces = ts.pieces(a, b);
  std::size_t evals = 0;
  V acc = f(ts.snap_point(a)) * 0.0;
  for (const Piece& p : pieces) {
    if (p.dense()) {
      acc = acc + detail::adaptive_simpson(f, p.lo, p.hi, opts, evals);
    } else {
      V v = f(p.lo);
      if (!detail::value_finite(v)) {
        throw Error(ErrorCode::NonFiniteValue, "integrand at t=" + std::to_string(p.lo));
      }
      acc = acc + v * p.mu;
    }
  }
  return acc;
}

/// Delta-derivative of f at t. Right-scattered: exact forward quotient.
/// Right-dense: central difference with step h kept inside the cell,
/// second-order one-sided at a left cell edge. h <= 0 selects the default
/// 1e-6 * max(1, |t|).
template <class F>
detail::value_t<F> delta_derivative(F&& f, const TimeScaleWindow& ts, double t, double h = 0.0) {
  using V = detail::value_t<F>;
  const JumpInfo j = ts.jump(t);
  if (j.window_edge) {
    throw Error(ErrorCode::WindowEdge, "delta_derivative at window maximum t=" + std::to_string(t));
  }
  auto checked = [&](double x) -> V {
    V v = f(x);
    if (!detail::value_finite(v)) {
      throw Error(ErrorCode::NonFiniteValue, "function value at t=" + std::to_string(x));
    }
    return v;
  };
  const double tt = ts.snap_point(t);
  if (j.cls == PointClass::RightScattered) {
    return V((checked(j.sigma) - checked(tt)) * (1.0 / j.mu));
  }
  if (h <= 0.0) h = 1e-6 * std::max(1.0, std::abs(tt));
  const TimeCell& cell = ts.cells()[*ts.locate(tt)];
  const double room_right = cell.hi - tt;
  const double room_left = tt - cell.lo;
  const double hr = std::min(h, room_right);
  if (room_left >= hr) {
    return V((checked(tt + hr) - checked(tt - hr)) * (0.5 / hr));
  }
  const double hf = 0.5 * hr;
  return V((checked(tt) * -3.0 + checked(tt + hf) * 4.0 - checked(tt + 2.0 * hf)) * (0.5 / hf));
}

}  // namespace tsfloquet
