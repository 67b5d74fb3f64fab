#pragma once

#include <cstddef>

#include "tsfloquet/timescale.hpp"

namespace tsfloquet {

/// Scalar value paired with the graininess at its evaluation point.
struct RegressiveScalar {
  Complex value;
  double graininess = 0.0;

  [[nodiscard]] bool regressive(double snap = kSnap) const {
    return std::abs(1.0 + graininess * value) > snap;
  }
};

struct ScalarExpResult {
  Complex value;
  /// Scattered points where 1 + mu p landed on the negative real axis.
  std::size_t branch_cut_points = 0;
};

/// e_p(t, s) through the cylinder transform; the dense-segment integrand is
/// p itself (the mu -> 0 limit taken exactly). t < s gives 1 / e_p(s, t).
ScalarExpResult scalar_exp_detailed(const ComplexFn& p, const TimeScaleWindow& ts, double t,
                                    double s, const QuadratureOptions& opts = {});

inline Complex scalar_exp(const ComplexFn& p, const TimeScaleWindow& ts, double t, double s,
                          const QuadratureOptions& opts = {}) {
  return scalar_exp_detailed(p, ts, t, s, opts).value;
}

/// Cylinder transform Log(1 + mu z) / mu, or z when mu == 0.
Complex cylinder(Complex z, double mu);

Complex circle_plus(Complex a, Complex b, double mu);
Complex circle_negate(Complex a, double mu);
Complex circle_minus(Complex a, Complex b, double mu);

/// Hilger real part (|1 + mu z| - 1) / mu; Re z when mu == 0.
double re_mu(Complex z, double mu);

/// Hilger purely imaginary number (e^{i omega mu} - 1) / mu. Throws
/// OmegaOutOfStrip unless -pi/mu < omega <= pi/mu.
Complex hilger_imaginary(double omega, double mu);
/// Same value without the strip check.
Complex hilger_imaginary_unchecked(double omega, double mu);
[[nodiscard]] bool in_hilger_strip(double omega, double mu);

/// Re_mu(z) < 0.
bool in_hilger_circle(Complex z, double mu);

/// theta^{-1} <= |1 + mu z|.
bool uniformly_regressive(Complex z, double mu, double theta_bound);

}  // namespace tsfloquet
