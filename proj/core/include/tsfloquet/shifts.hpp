#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsfloquet/expr.hpp"
#include "tsfloquet/timescale.hpp"

namespace tsfloquet {

enum class ShiftDirection { Forward, Backward };

/// Forward and backward shift operators associated with an initial point t0,
/// together with the period T used by every Floquet computation.
///
/// The builtin catalog carries closed forms:
///   additive        t +- s                          t0 = 0
///   multiplicative  s^{+-1} t  (t / s^{+-1} for t<0) t0 = 1
///   sqrt            (t^2 +- s^2)^{1/2}              t0 = 0
///   signed_squares  (sqrt t +- sqrt s)^2 on t>0, +-s at 0,
///                   -(sqrt(-t) +- sqrt s)^2 on t<0   t0 = 0
///   logistic        logit^{-1}(logit t +- logit s)   t0 = 1/2
class ShiftSystem {
 public:
  using Map = std::function<double(double s, double t)>;
  using Domain = std::function<bool(double s, double t)>;
  using Star = std::function<bool(double t)>;
  /// d/dt of t -> delta_dir(T, t) when it is known in closed form.
  using ShiftDerivative = std::function<double(ShiftDirection dir, double T, double t)>;
  /// d/ds of s -> delta_-(s, u).
  using BackwardDs = std::function<double(double s, double u)>;

  struct Parts {
    std::string kind;
    double t0 = 0.0;
    double period = 1.0;
    Map forward;
    Map backward;
    Domain domain_forward;
    Domain domain_backward;
    Star in_star;
    ShiftDerivative analytic_shift_dderiv;
    BackwardDs backward_ds;
  };

  explicit ShiftSystem(Parts parts);

  static ShiftSystem additive(double T);
  static ShiftSystem multiplicative(double T);
  static ShiftSystem sqrt_shift(double T);
  static ShiftSystem signed_squares(double T);
  static ShiftSystem logistic(double T);
  /// User maps in variables s and t. Derivatives fall back to differencing.
  static ShiftSystem custom(double t0, double T, const Expr& forward, const Expr& backward,
                            ParamMap params = {});

  [[nodiscard]] const std::string& kind() const noexcept { return parts_.kind; }
  [[nodiscard]] double t0() const noexcept { return parts_.t0; }
  [[nodiscard]] double period() const noexcept { return parts_.period; }
  [[nodiscard]] ShiftSystem with_period(double T) const;

  [[nodiscard]] bool in_domain(ShiftDirection dir, double s, double t) const;
  [[nodiscard]] bool in_star(double t) const;
  [[nodiscard]] bool has_analytic_derivative() const noexcept {
    return static_cast<bool>(parts_.analytic_shift_dderiv);
  }

  /// delta_{+-}(s, t); OutOfDomain when the domain predicate rejects (s, t).
  [[nodiscard]] double shift(ShiftDirection dir, double s, double t) const;
  [[nodiscard]] double forward(double s, double t) const { return shift(ShiftDirection::Forward, s, t); }
  [[nodiscard]] double backward(double s, double t) const { return shift(ShiftDirection::Backward, s, t); }

  /// k-fold composition of delta_{+-}(T, .); k = 0 returns t.
  [[nodiscard]] double iterate(ShiftDirection dir, double T, std::size_t k, double t) const;

  /// The one-period map delta_+(T, t) with the system's own period.
  [[nodiscard]] double advance(double t) const { return forward(period(), t); }

  [[nodiscard]] std::optional<double> analytic_shift_dderiv(ShiftDirection dir, double T,
                                                            double t) const;
  [[nodiscard]] std::optional<double> backward_ds(double s, double u) const;

 private:
  Parts parts_;
};

/// Delta-derivative of t -> delta_dir(T, t) on ts (closed form when the
/// catalog has one, otherwise delta_derivative of the composed map).
double shift_delta_derivative(const ShiftSystem& sys, const TimeScaleWindow& ts,
                              ShiftDirection dir, double T, double t);

/// Anchors delta_+^{(k)}(T, t0), the period counter m(t) and the additive
/// clock Theta(t). Anchors are cached append-only; concurrent readers are safe.
class ThetaTable {
 public:
  explicit ThetaTable(ShiftSystem sys, std::size_t cap = 1'000'000);

  ThetaTable(const ThetaTable&) = delete;
  ThetaTable& operator=(const ThetaTable&) = delete;

  [[nodiscard]] const ShiftSystem& system() const noexcept { return sys_; }
  [[nodiscard]] double period() const noexcept { return sys_.period(); }

  [[nodiscard]] double anchor(std::size_t k) const;
  /// delta_-(a_{j-1}, a_j), j >= 1.
  [[nodiscard]] double increment(std::size_t j) const;
  /// Sum of the first k increments; Theta at the k-th anchor.
  [[nodiscard]] double anchor_theta(std::size_t k) const;

  /// min{k : a_k >= t}.
  [[nodiscard]] std::size_t m(double t) const;
  /// Index k when t coincides with an anchor within the snap tolerance.
  [[nodiscard]] std::optional<std::size_t> anchor_index(double t) const;

  [[nodiscard]] double theta(double t) const;
  /// Right derivative of Theta at t, used at right-dense points.
  [[nodiscard]] double theta_derivative(double t) const;

 private:
  void extend_to(std::size_t k) const;
  void extend_past(double t) const;

  ShiftSystem sys_;
  std::size_t cap_;
  mutable std::mutex mutex_;
  mutable std::vector<double> anchors_;
  mutable std::vector<double> cumulative_;
};

enum class PeriodicityMode { Scale, Axioms, Function, DeltaFunction };

struct Violation {
  std::string check;
  double s = 0.0;
  double t = 0.0;
  double residual = 0.0;
};

struct PeriodicityReport {
  bool pass = true;
  std::size_t checked = 0;
  std::vector<Violation> violations;
};

/// Scale: delta_{+-}(T, t) stays in the scale and commutes with sigma.
/// Axioms: shift-operator axioms and their corollary identities on pairs
/// built from the samples. Function: f(delta(T, t)) = f(t).
/// DeltaFunction: f(delta(T, t)) * delta^Delta(T, t) = f(t).
PeriodicityReport verify_periodicity(const ShiftSystem& sys, const TimeScaleWindow& ts,
                                     PeriodicityMode mode, std::span<const double> samples,
                                     const ScalarFn& f = {}, double rtol = 1e-10);

/// Axiom checks on explicit (s, t) pairs; consecutive pairs supply the second
/// arguments of the two-point properties.
PeriodicityReport verify_shift_axioms(const ShiftSystem& sys,
                                      std::span<const std::pair<double, double>> pairs,
                                      double rtol = 1e-10);

/// Window samples usable as shift arguments (members of T*).
std::vector<double> periodicity_samples(const ShiftSystem& sys, const TimeScaleWindow& ts,
                                        std::size_t count);

}  // namespace tsfloquet
