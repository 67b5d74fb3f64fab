#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "tsfloquet/hilger.hpp"
#include "tsfloquet/matpow.hpp"
#include "tsfloquet/shifts.hpp"
#include "tsfloquet/transition.hpp"

namespace tsfloquet {

struct FloquetOptions {
  TransitionOptions transition;
  SpectralOptions spectral;
  /// |lambda - 1| below this counts as a unit multiplier.
  double unit_tol = 1e-8;
};

struct Monodromy {
  Matrix matrix;
  /// Eigenvalues repeated according to algebraic multiplicity.
  std::vector<Complex> multipliers;
  double t0 = 0.0;
  double t1 = 0.0;
};

/// M = Phi_A(delta_+(T, t0), t0) and its eigenvalues.
Monodromy monodromy(const MatrixFunction& A, const TimeScaleWindow& ts, const ShiftSystem& sys,
                    const TransitionOptions& opts = {});

/// Psi(t1) Psi(t0)^{-1} for the fundamental matrix with Psi(t0) = psi0.
Matrix monodromy_from_fundamental(const MatrixFunction& A, const TimeScaleWindow& ts,
                                  const ShiftSystem& sys, const Matrix& psi0,
                                  const TransitionOptions& opts = {});

/// Phi_A(t, t0) = L(t) e_R(t, t0) with e_R(t, t0) = M^{Theta(t)/T}.
class FloquetDecomposition {
 public:
  FloquetDecomposition(MatrixFunction A, TimeScaleWindow ts, ShiftSystem sys,
                       FloquetOptions opts = {});

  [[nodiscard]] const MatrixFunction& system_matrix() const noexcept { return A_; }
  [[nodiscard]] const TimeScaleWindow& timescale() const noexcept { return ts_; }
  [[nodiscard]] const ShiftSystem& shifts() const noexcept { return theta_->system(); }
  [[nodiscard]] const ThetaTable& theta() const noexcept { return *theta_; }
  [[nodiscard]] const FloquetOptions& options() const noexcept { return opts_; }

  [[nodiscard]] double t0() const noexcept { return mono_.t0; }
  [[nodiscard]] double t1() const noexcept { return mono_.t1; }
  [[nodiscard]] double period() const noexcept { return theta_->period(); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return A_.rows(); }

  [[nodiscard]] const Matrix& monodromy() const noexcept { return mono_.matrix; }
  [[nodiscard]] const std::vector<Complex>& multipliers() const noexcept { return mono_.multipliers; }
  [[nodiscard]] const SpectralData& spectral() const noexcept { return spectral_; }
  [[nodiscard]] const Matrix& log_monodromy() const noexcept { return log_m_; }

  /// Phi_A(t, t0), cached by time and resumed from the nearest earlier entry.
  [[nodiscard]] Matrix phi(double t) const;
  [[nodiscard]] Matrix R(double t) const;
  [[nodiscard]] Matrix e_R(double t) const;
  [[nodiscard]] Matrix e_R_inverse(double t) const;
  [[nodiscard]] Matrix L(double t) const;

  /// The additive-clock ratio Theta' at dense points and
  /// (Theta(sigma) - Theta) / mu at scattered ones.
  [[nodiscard]] double lambda_ratio(double t) const;

  /// gamma(t) for a multiplier lambda: (lambda^{dTheta/T} - 1) / mu at
  /// scattered points, (Theta'/T) Log lambda at dense ones. These are the
  /// eigenvalues of R(t).
  [[nodiscard]] Complex multiplier_path(Complex lambda, double t) const;

 private:
  MatrixFunction A_;
  TimeScaleWindow ts_;
  std::shared_ptr<ThetaTable> theta_;
  FloquetOptions opts_;
  Monodromy mono_;
  SpectralData spectral_;
  Matrix log_m_;
  mutable std::mutex cache_mutex_;
  mutable std::map<double, Matrix> phi_cache_;
};

/// Constant exponent gamma0 with e_{gamma0}(t1, t0) = lambda, shifted to
/// branch k by the Hilger imaginary number of 2 pi k / (t1 - t0).
struct FloquetExponent {
  Complex lambda;
  Complex gamma0;
  long branch = 0;
  double omega = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  /// |e_{gamma0}(t1, t0) - lambda| / |lambda| after root finding.
  double residual = 0.0;
  /// Period points where omega leaves the Hilger strip (-pi/mu, pi/mu].
  std::size_t strip_violations = 0;
  /// Root finding needed the continuation fallback.
  bool continued = false;

  /// gamma0 (+) i-circle(omega) at the graininess of t.
  [[nodiscard]] Complex value(const TimeScaleWindow& ts, double t) const;
};

struct ExponentOptions {
  double tol = 1e-12;
  int max_iter = 100;
  int continuation_steps = 64;
};

FloquetExponent exponent_from_multiplier(Complex lambda, const ShiftSystem& sys,
                                         const TimeScaleWindow& ts, long k = 0,
                                         const ExponentOptions& opts = {});

struct PeriodicSolution {
  bool exists = false;
  Vector x0;
  /// |Phi(t1, t0) x0 - x0| for the returned vector.
  double residual = 0.0;
};

PeriodicSolution homogeneous_periodic_solution(const FloquetDecomposition& dec,
                                               std::optional<double> tol = std::nullopt);

/// x0 = (I - M)^{-1} y(t1) where y solves the forced system from y(t0) = 0.
Vector nonhomogeneous_periodic_state(const MatrixFunction& A, const MatrixFunction& F,
                                     const TimeScaleWindow& ts, const ShiftSystem& sys,
                                     double tol = 1e-8, const TransitionOptions& opts = {});

/// Unit vector spanning the numerical null space of M - lambda I.
Vector multiplier_eigenvector(const Matrix& M, Complex lambda);

/// lambda^{Theta(t)/T} L(t) u, which equals e_gamma(t, t0) L(t) u for the
/// multiplier path gamma wherever Theta is continuous; u defaults to
/// multiplier_eigenvector(M, lambda).
Vector bloch_solution(const FloquetDecomposition& dec, Complex lambda, double t,
                      const std::optional<Vector>& u = std::nullopt);

}  // namespace tsfloquet
