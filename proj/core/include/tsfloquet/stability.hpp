#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tsfloquet/floquet.hpp"

namespace tsfloquet {

/// (Theta(sigma) - Theta) / mu at right-scattered t, Theta'(t) at right-dense t.
double lambda_ratio(const ThetaTable& theta, const TimeScaleWindow& ts, double t);

struct MonomialOptions {
  /// Grid density on dense segments; each segment gets at least 64 steps.
  double steps_per_unit = 4096.0;
};

/// h_0 = 1, h_{k+1}(t, t0) = Delta-integral over [t0, t) of lambda_ratio * h_k.
/// Exact sums at scattered points, a cumulative quadratic rule on dense ones.
double monomial_h(const ThetaTable& theta, const TimeScaleWindow& ts, int k, double t, double t0,
                  const MonomialOptions& opts = {});

/// gamma_i(t) for every multiplier, repeated by multiplicity.
std::vector<Complex> eigenvalue_paths(const FloquetDecomposition& dec, double t);

struct RegressivityCertificate {
  /// min{1, min_i |lambda_i|} - tol
  double theta_inv = 1.0;
  /// Smallest |1 + mu gamma_i| seen on the samples.
  double observed_min = 1.0;
  bool pass = true;
};

RegressivityCertificate uniform_regressivity_certificate(const FloquetDecomposition& dec,
                                                         std::span<const double> samples,
                                                         double tol = 1e-9);

enum class Verdict { ExponentiallyStable, AsymptoticallyStable, Stable, Unstable, Inconclusive };

std::string_view to_string(Verdict v) noexcept;

struct StabilityOptions {
  double horizon = 0.0;  // H
  double t_max = 0.0;
  std::size_t samples = 200;
  double eps_tol = 1e-9;
  /// Margin for the exponential upgrade; 0 disables it.
  double epsilon = 0.0;
  /// Multiplier modulus tolerance for the corollary classifier.
  double modulus_tol = 1e-8;
  double rank_tol = 1e-10;
};

/// One distinct multiplier and its exponent track over the samples.
struct EigenTrack {
  Complex multiplier;
  int algebraic = 1;
  int geometric = 1;
  std::vector<Complex> gamma;
  std::vector<double> re_mu;
  /// min over samples of -Re_mu(gamma) / lambda_ratio
  double infimum = 0.0;
  /// min over samples of -Re_mu(gamma)
  double epsilon_stat = 0.0;
};

struct StabilityReport {
  double horizon = 0.0;
  double t_max = 0.0;
  std::vector<double> samples;
  std::vector<double> lambda_ratio;
  std::vector<EigenTrack> tracks;
  RegressivityCertificate certificate;
  Verdict theorem = Verdict::Inconclusive;
  Verdict corollary = Verdict::Inconclusive;
  std::vector<std::string> notes;
};

StabilityReport classify(const FloquetDecomposition& dec, const StabilityOptions& opts);

/// The multiplier-modulus rule on its own.
Verdict classify_multipliers(const SpectralData& spectral, double modulus_tol = 1e-8,
                             double rank_tol = 1e-10);

}  // namespace tsfloquet
