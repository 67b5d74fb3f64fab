#include "tsfloquet/hilger.hpp"

#include <numbers>

namespace tsfloquet {

namespace {

void require_regressive(Complex a, double mu, const char* op) {
  if (std::abs(1.0 + mu * a) <= kSnap) {
    throw Error(ErrorCode::RegressivityViolation,
                std::string(op) + ": 1 + mu*a vanishes (mu=" + std::to_string(mu) + ")");
  }
}

}  // namespace

Complex cylinder(Complex z, double mu) {
  if (mu == 0.0) return z;
  return std::log(1.0 + mu * z) / mu;
}

ScalarExpResult scalar_exp_detailed(const ComplexFn& p, const TimeScaleWindow& ts, double t,
                                    double s, const QuadratureOptions& opts) {
  if (t < s) {
    ScalarExpResult r = scalar_exp_detailed(p, ts, s, t, opts);
    r.value = 1.0 / r.value;
    return r;
  }
  ScalarExpResult out{Complex(1.0, 0.0), 0};
  Complex exponent(0.0, 0.0);
  std::size_t evals = 0;
  for (const Piece& piece : ts.pieces(s, t)) {
    if (piece.dense()) {
      auto integrand = [&](double x) { return p(x); };
      exponent += detail::adaptive_simpson(integrand, piece.lo, piece.hi, opts, evals);
      continue;
    }
    const Complex w = 1.0 + piece.mu * p(piece.lo);
    if (std::abs(w) <= ts.snap()) {
      throw Error(ErrorCode::RegressivityViolation,
                  "1 + mu p vanishes at t=" + std::to_string(piece.lo));
    }
    if (w.imag() == 0.0 && w.real() < 0.0) ++out.branch_cut_points;
    exponent += std::log(w);
  }
  out.value = std::exp(exponent);
  return out;
}

Complex circle_plus(Complex a, Complex b, double mu) {
  require_regressive(a, mu, "circle_plus");
  require_regressive(b, mu, "circle_plus");
  return a + b + mu * a * b;
}

Complex circle_negate(Complex a, double mu) {
  require_regressive(a, mu, "circle_negate");
  return -a / (1.0 + mu * a);
}

Complex circle_minus(Complex a, Complex b, double mu) {
  return circle_plus(a, circle_negate(b, mu), mu);
}

double re_mu(Complex z, double mu) {
  if (mu == 0.0) return z.real();
  // (|1 + mu z|^2 - 1) / (mu (|1 + mu z| + 1)) avoids cancellation for small mu.
  const double m = std::abs(1.0 + mu * z);
  if (!std::isfinite(m)) return (m - 1.0) / mu;
  return (2.0 * z.real() + mu * std::norm(z)) / (m + 1.0);
}

bool in_hilger_strip(double omega, double mu) {
  if (mu == 0.0) return true;
  const double bound = std::numbers::pi / mu;
  return omega > -bound && omega <= bound;
}

Complex hilger_imaginary_unchecked(double omega, double mu) {
  if (mu == 0.0) return Complex(0.0, omega);
  return (std::exp(Complex(0.0, omega * mu)) - 1.0) / mu;
}

Complex hilger_imaginary(double omega, double mu) {
  if (!in_hilger_strip(omega, mu)) {
    throw Error(ErrorCode::OmegaOutOfStrip,
                "omega=" + std::to_string(omega) + " outside (-pi/mu, pi/mu] for mu=" +
                    std::to_string(mu));
  }
  return hilger_imaginary_unchecked(omega, mu);
}

bool in_hilger_circle(Complex z, double mu) { return re_mu(z, mu) < 0.0; }

bool uniformly_regressive(Complex z, double mu, double theta_bound) {
  return 1.0 / theta_bound <= std::abs(1.0 + mu * z);
}

}  // namespace tsfloquet
