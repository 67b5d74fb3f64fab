#pragma once

#include <vector>

#include "tsfloquet/errors.hpp"
#include "tsfloquet/types.hpp"

namespace tsfloquet {

struct SpectralOptions {
  /// Eigenvalues closer than cluster_tol * ||M|| share a cluster.
  double cluster_tol = 1e-8;
  /// Rank threshold for geometric multiplicity, relative to ||M||.
  double rank_tol = 1e-10;
  /// Throw ClusteringAmbiguous instead of merging borderline clusters.
  bool strict = false;
};

/// Distinct eigenvalues with algebraic multiplicities and spectral
/// projections of a nonsingular matrix.
struct SpectralData {
  Matrix matrix;
  std::vector<Complex> eigenvalues;
  std::vector<int> multiplicities;
  std::vector<Matrix> projections;
  /// Principal logarithms of the eigenvalues.
  std::vector<Complex> logs;
  /// Set when borderline eigenvalues were merged into one cluster.
  bool ambiguous = false;

  [[nodiscard]] Eigen::Index dim() const noexcept { return matrix.rows(); }
  [[nodiscard]] std::size_t clusters() const noexcept { return eigenvalues.size(); }
};

SpectralData spectral_decompose(const Matrix& M, const SpectralOptions& opts = {});

/// M^r on the principal branch, r real.
Matrix real_power(const SpectralData& s, double r);
Matrix real_power(const Matrix& M, double r);

/// Same construction with a complex exponent.
Matrix complex_power(const SpectralData& s, Complex r);

/// Principal matrix logarithm built from the same projections.
Matrix matrix_log(const SpectralData& s);

struct ProjectionResiduals {
  /// ||sum P_i - I||
  double completeness = 0.0;
  /// max_i ||P_i^2 - P_i||
  double idempotence = 0.0;
  /// max_{i != j} ||P_i P_j||
  double orthogonality = 0.0;

  [[nodiscard]] double max() const noexcept;
};

ProjectionResiduals projection_residuals(const SpectralData& s);

/// n - rank(M - lambda I), rank taken at rank_tol * ||M||.
int geometric_multiplicity(const Matrix& M, Complex lambda, double rank_tol = 1e-10);

/// Coefficients r (r-1) ... (r-j+1) / j! for j = 0..count-1.
std::vector<Complex> falling_binomials(Complex r, int count);

}  // namespace tsfloquet
