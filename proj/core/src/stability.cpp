#include "tsfloquet/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tsfloquet {

double lambda_ratio(const ThetaTable& theta, const TimeScaleWindow& ts, double t) {
  const JumpInfo j = ts.jump(t);
  if (j.window_edge) {
    throw Error(ErrorCode::WindowEdge, "sigma undefined at the window maximum");
  }
  if (j.cls == PointClass::RightScattered) {
    return (theta.theta(j.sigma) - theta.theta(t)) / j.mu;
  }
  return theta.theta_derivative(t);
}

double monomial_h(const ThetaTable& theta, const TimeScaleWindow& ts, int k, double t, double t0,
                  const MonomialOptions& opts) {
  if (k < 0) throw Error(ErrorCode::ConfigError, "monomial order must be nonnegative");
  if (t < t0 - snap_at(t, ts.snap())) throw Error(ErrorCode::ReversedBounds, "h_k needs t >= t0");
  if (k == 0) return 1.0;

  struct Block {
    bool dense;
    std::vector<double> nodes;
    std::vector<double> ratio;
    double mu = 0.0;
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
      for (double x : b.nodes) b.ratio.push_back(theta.theta_derivative(x));
    } else {
      b.nodes.push_back(p.lo);
      b.mu = p.mu;
      b.ratio.push_back(lambda_ratio(theta, ts, p.lo));
    }
    blocks.push_back(std::move(b));
  }

  std::vector<std::vector<double>> prev(blocks.size()), cur(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) prev[b].assign(blocks[b].nodes.size(), 1.0);
  double running = 0.0;
  for (int order = 1; order <= k; ++order) {
    running = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const Block& blk = blocks[b];
      auto& out = cur[b];
      out.assign(blk.nodes.size(), 0.0);
      out[0] = running;
      if (!blk.dense) {
        running += blk.mu * blk.ratio[0] * prev[b][0];
        continue;
      }
      const std::size_t N = blk.nodes.size() - 1;
      const double h = (blk.nodes.back() - blk.nodes.front()) / static_cast<double>(N);
      std::vector<double> g(N + 1);
      for (std::size_t j = 0; j <= N; ++j) g[j] = blk.ratio[j] * prev[b][j];
      for (std::size_t j = 0; j < N; ++j) {
        running += (j + 2 <= N) ? (5.0 * g[j] + 8.0 * g[j + 1] - g[j + 2]) * (h / 12.0)
                                : (-g[j - 1] + 8.0 * g[j] + 5.0 * g[j + 1]) * (h / 12.0);
        out[j + 1] = running;
      }
    }
    std::swap(prev, cur);
  }
  return running;
}

std::vector<Complex> eigenvalue_paths(const FloquetDecomposition& dec, double t) {
  std::vector<Complex> out;
  const auto& s = dec.spectral();
  for (std::size_t i = 0; i < s.clusters(); ++i) {
    const Complex g = dec.multiplier_path(s.eigenvalues[i], t);
    for (int r = 0; r < s.multiplicities[i]; ++r) out.push_back(g);
  }
  return out;
}

RegressivityCertificate uniform_regressivity_certificate(const FloquetDecomposition& dec,
                                                         std::span<const double> samples,
                                                         double tol) {
  RegressivityCertificate c;
  double min_modulus = 1.0;
  for (Complex lambda : dec.spectral().eigenvalues) min_modulus = std::min(min_modulus, std::abs(lambda));
  c.theta_inv = min_modulus - tol;
  c.observed_min = std::numeric_limits<double>::infinity();
  for (double t : samples) {
    const double mu = dec.timescale().mu(t);
    for (Complex lambda : dec.spectral().eigenvalues) {
      const double v = std::abs(1.0 + mu * dec.multiplier_path(lambda, t));
      c.observed_min = std::min(c.observed_min, v);
      if (v < c.theta_inv) c.pass = false;
    }
  }
  if (samples.empty()) c.observed_min = 1.0;
  return c;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::ExponentiallyStable: return "ExponentiallyStable";
    case Verdict::AsymptoticallyStable: return "AsymptoticallyStable";
    case Verdict::Stable: return "Stable";
    case Verdict::Unstable: return "Unstable";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

Verdict classify_multipliers(const SpectralData& spectral, double modulus_tol, double rank_tol) {
  bool all_inside = true;
  bool defective_unit = false;
  for (std::size_t i = 0; i < spectral.clusters(); ++i) {
    const double r = std::abs(spectral.eigenvalues[i]);
    if (r > 1.0 + modulus_tol) return Verdict::Unstable;
    if (r >= 1.0 - modulus_tol) {
      all_inside = false;
      const int geo = geometric_multiplicity(spectral.matrix, spectral.eigenvalues[i], rank_tol);
      if (geo < spectral.multiplicities[i]) defective_unit = true;
    }
  }
  if (all_inside) return Verdict::ExponentiallyStable;
  return defective_unit ? Verdict::Unstable : Verdict::Stable;
}

StabilityReport classify(const FloquetDecomposition& dec, const StabilityOptions& opts) {
  const TimeScaleWindow& ts = dec.timescale();
  StabilityReport rep;
  rep.horizon = opts.horizon;
  rep.t_max = std::min(opts.t_max, ts.max());
  if (rep.horizon < dec.t0() - snap_at(dec.t0(), ts.snap()) || rep.horizon > rep.t_max) {
    throw Error(ErrorCode::EmptyHorizon, "stability horizon must satisfy t0 <= H <= t_max");
  }
  for (double t : ts.sample(rep.horizon, rep.t_max, opts.samples)) {
    if (!ts.jump(t).window_edge) rep.samples.push_back(t);
  }
  if (rep.samples.empty()) throw Error(ErrorCode::EmptyHorizon, "no samples in the horizon");

  for (double t : rep.samples) rep.lambda_ratio.push_back(lambda_ratio(dec.theta(), ts, t));

  const auto& spectral = dec.spectral();
  bool some_unstable = false;
  double inf_all = std::numeric_limits<double>::infinity();
  double eps_all = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spectral.clusters(); ++i) {
    EigenTrack track;
    track.multiplier = spectral.eigenvalues[i];
    track.algebraic = spectral.multiplicities[i];
    track.geometric = geometric_multiplicity(spectral.matrix, track.multiplier, opts.rank_tol);
    track.infimum = std::numeric_limits<double>::infinity();
    track.epsilon_stat = std::numeric_limits<double>::infinity();
    bool positive_everywhere = true;
    for (std::size_t s = 0; s < rep.samples.size(); ++s) {
      const double t = rep.samples[s];
      const Complex g = dec.multiplier_path(track.multiplier, t);
      const double r = re_mu(g, ts.mu(t));
      if (!std::isfinite(r) || !std::isfinite(std::abs(g))) {
        throw Error(ErrorCode::NonFiniteValue, "exponent track at t=" + std::to_string(t));
      }
      track.gamma.push_back(g);
      track.re_mu.push_back(r);
      track.infimum = std::min(track.infimum, -r / rep.lambda_ratio[s]);
      track.epsilon_stat = std::min(track.epsilon_stat, -r);
      if (!(r > opts.eps_tol)) positive_everywhere = false;
    }
    some_unstable = some_unstable || positive_everywhere;
    inf_all = std::min(inf_all, track.infimum);
    eps_all = std::min(eps_all, track.epsilon_stat);
    rep.tracks.push_back(std::move(track));
  }

  if (some_unstable) {
    rep.theorem = Verdict::Unstable;
  } else if (inf_all > opts.eps_tol) {
    rep.theorem = (opts.epsilon > 0.0 && eps_all >= opts.epsilon) ? Verdict::ExponentiallyStable
                                                                  : Verdict::AsymptoticallyStable;
  } else if (inf_all >= -opts.eps_tol) {
    bool defective = false;
    for (const EigenTrack& tr : rep.tracks) {
      if (tr.infimum <= opts.eps_tol && tr.geometric < tr.algebraic) defective = true;
    }
    rep.theorem = defective ? Verdict::Unstable : Verdict::Stable;
  } else {
    rep.theorem = Verdict::Inconclusive;
  }
  rep.corollary = classify_multipliers(spectral, opts.modulus_tol, opts.rank_tol);
  rep.certificate = uniform_regressivity_certificate(dec, rep.samples);

  std::ostringstream label;
  label << "finite-horizon numerical verdicts on [" << rep.horizon << ", " << rep.t_max << "] from "
        << rep.samples.size() << " samples";
  rep.notes.push_back(label.str());
  if (rep.theorem != rep.corollary) {
    std::ostringstream os;
    os << "classifiers disagree: theorem conditions give " << to_string(rep.theorem)
       << ", multiplier moduli give " << to_string(rep.corollary);
    if (rep.theorem == Verdict::AsymptoticallyStable && opts.epsilon <= 0.0) {
      os << " (exponential margin not requested)";
    } else if (rep.theorem == Verdict::AsymptoticallyStable) {
      os << " (exponential margin " << opts.epsilon << " fails: min -Re_mu gamma = " << eps_all
         << ")";
    }
    rep.notes.push_back(os.str());
  }
  if (spectral.ambiguous) {
    rep.notes.push_back("borderline eigenvalues were merged into a single cluster");
  }
  if (!rep.certificate.pass) {
    rep.notes.push_back("uniform regressivity bound violated on the samples");
  }
  return rep;
}

}  // namespace tsfloquet
