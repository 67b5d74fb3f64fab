#pragma once

#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace tsfloquet {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

using ScalarFn = std::function<double(double)>;
using ComplexFn = std::function<Complex(double)>;

/// Default absolute snap used for membership and boundary comparisons.
inline constexpr double kSnap = 1e-12;

/// Snap tolerance scaled to the magnitude of t, so that generated endpoints
/// such as large powers of q still compare equal.
inline double snap_at(double t, double snap = kSnap) {
  return snap * (std::abs(t) > 1.0 ? std::abs(t) : 1.0);
}

/// Max-abs entry norm; the residual norm used throughout the library.
inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace tsfloquet
