#pragma once

#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "tsfloquet/types.hpp"

namespace tsfloquet::testing {

/// Reference matrix functions from Eigen's Schur-Parlett implementation.
inline Matrix expm(const Matrix& a) { return a.exp(); }
inline Matrix logm(const Matrix& a) { return a.log(); }

inline double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(d(rng), 0.0);
  return m;
}

}  // namespace tsfloquet::testing
