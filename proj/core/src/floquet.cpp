#include "tsfloquet/floquet.hpp"

#include <cmath>
#include <numbers>

namespace tsfloquet {

namespace {

double one_period_end(const TimeScaleWindow& ts, const ShiftSystem& sys) {
  const double t0 = sys.t0();
  const double t1 = sys.advance(t0);
  if (!ts.contains(t0)) {
    throw Error(ErrorCode::PointNotInScale, "t0=" + std::to_string(t0) + " is not in the window");
  }
  if (t1 > ts.max() + snap_at(t1, ts.snap())) {
    throw Error(ErrorCode::EmptyHorizon,
                "window ends before delta_+(T, t0)=" + std::to_string(t1));
  }
  return ts.snap_point(t1);
}

}  // namespace

Monodromy monodromy(const MatrixFunction& A, const TimeScaleWindow& ts, const ShiftSystem& sys,
                    const TransitionOptions& opts) {
  Monodromy out;
  out.t0 = sys.t0();
  out.t1 = one_period_end(ts, sys);
  out.matrix = transition_matrix(A, ts, out.t1, out.t0, opts);
  Eigen::ComplexEigenSolver<Matrix> solver(out.matrix, false);
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const Complex lambda = solver.eigenvalues()(i);
    if (std::abs(lambda) < kSnap) {
      throw Error(ErrorCode::DegenerateMultiplier, "multiplier with modulus below snap");
    }
    out.multipliers.push_back(lambda);
  }
  return out;
}

Matrix monodromy_from_fundamental(const MatrixFunction& A, const TimeScaleWindow& ts,
                                  const ShiftSystem& sys, const Matrix& psi0,
                                  const TransitionOptions& opts) {
  const double t0 = sys.t0();
  const double t1 = one_period_end(ts, sys);
  const Matrix psi1 = propagate(A, ts, t0, t1, psi0, opts);
  return psi1 * Eigen::PartialPivLU<Matrix>(psi0).inverse();
}

// --------------------------------------------------------------------------

FloquetDecomposition::FloquetDecomposition(MatrixFunction A, TimeScaleWindow ts, ShiftSystem sys,
                                           FloquetOptions opts)
    : A_(std::move(A)),
      ts_(std::move(ts)),
      theta_(std::make_shared<ThetaTable>(std::move(sys))),
      opts_(opts) {
  mono_ = tsfloquet::monodromy(A_, ts_, theta_->system(), opts_.transition);
  spectral_ = spectral_decompose(mono_.matrix, opts_.spectral);
  log_m_ = matrix_log(spectral_);
  phi_cache_.emplace(mono_.t0, Matrix::Identity(dim(), dim()));
  phi_cache_.emplace(mono_.t1, mono_.matrix);
}

Matrix FloquetDecomposition::phi(double t) const {
  const double tt = ts_.snap_point(t);
  if (tt < t0()) return transition_matrix(A_, ts_, tt, t0(), opts_.transition);
  double from = t0();
  Matrix start;
  {
    std::lock_guard lock(cache_mutex_);
    auto it = phi_cache_.upper_bound(tt);
    --it;  // t0 is always cached
    if (it->first == tt) return it->second;
    from = it->first;
    start = it->second;
  }
  Matrix value = propagate(A_, ts_, from, tt, std::move(start), opts_.transition);
  std::lock_guard lock(cache_mutex_);
  phi_cache_.emplace(tt, value);
  return value;
}

double FloquetDecomposition::lambda_ratio(double t) const {
  const JumpInfo j = ts_.jump(t);
  if (j.window_edge) {
    throw Error(ErrorCode::WindowEdge, "sigma undefined at the window maximum");
  }
  if (j.cls == PointClass::RightScattered) {
    return (theta_->theta(j.sigma) - theta_->theta(t)) / j.mu;
  }
  return theta_->theta_derivative(t);
}

Matrix FloquetDecomposition::R(double t) const {
  const JumpInfo j = ts_.jump(t);
  if (j.window_edge) {
    throw Error(ErrorCode::WindowEdge, "sigma undefined at the window maximum");
  }
  if (j.cls == PointClass::RightScattered) {
    const double step = theta_->theta(j.sigma) - theta_->theta(t);
    const Matrix I = Matrix::Identity(dim(), dim());
    return (real_power(spectral_, step / period()) - I) / j.mu;
  }
  return (theta_->theta_derivative(t) / period()) * log_m_;
}

Matrix FloquetDecomposition::e_R(double t) const {
  return real_power(spectral_, theta_->theta(t) / period());
}

Matrix FloquetDecomposition::e_R_inverse(double t) const {
  return real_power(spectral_, -theta_->theta(t) / period());
}

Matrix FloquetDecomposition::L(double t) const { return phi(t) * e_R_inverse(t); }

Complex FloquetDecomposition::multiplier_path(Complex lambda, double t) const {
  const JumpInfo j = ts_.jump(t);
  if (j.window_edge) {
    throw Error(ErrorCode::WindowEdge, "sigma undefined at the window maximum");
  }
  const Complex log_lambda = std::log(lambda);
  if (j.cls == PointClass::RightScattered) {
    const double step = theta_->theta(j.sigma) - theta_->theta(t);
    return (std::exp(log_lambda * (step / period())) - 1.0) / j.mu;
  }
  return (theta_->theta_derivative(t) / period()) * log_lambda;
}

// --------------------------------------------------------------------------
// Exponents

Complex FloquetExponent::value(const TimeScaleWindow& ts, double t) const {
  if (branch == 0) return gamma0;
  const double mu = ts.mu(t);
  return circle_plus(gamma0, hilger_imaginary_unchecked(omega, mu), mu);
}

namespace {

struct PeriodStructure {
  std::vector<double> mus;
  double dense_length = 0.0;
};

PeriodStructure period_structure(const TimeScaleWindow& ts, double t0, double t1) {
  PeriodStructure p;
  for (const Piece& piece : ts.pieces(t0, t1)) {
    if (piece.dense()) {
      p.dense_length += piece.hi - piece.lo;
    } else {
      p.mus.push_back(piece.mu);
    }
  }
  return p;
}

Complex nearest_branch(Complex value, Complex reference) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double turns = std::round((reference.imag() - value.imag()) / two_pi);
  return value + Complex(0.0, turns * two_pi);
}

/// Sum_j Log(1 + mu_j g) + g * L - target and its derivative. With `refs`
/// each logarithm is continued from its previous value instead of taking
/// the principal branch.
std::pair<Complex, Complex> cylinder_map(const PeriodStructure& p, Complex g, Complex target,
                                         std::vector<Complex>* refs) {
  Complex value = g * p.dense_length - target;
  Complex slope = p.dense_length;
  for (std::size_t j = 0; j < p.mus.size(); ++j) {
    const Complex w = 1.0 + p.mus[j] * g;
    Complex lg = std::log(w);
    if (refs != nullptr) lg = nearest_branch(lg, (*refs)[j]);
    value += lg;
    slope += p.mus[j] / w;
  }
  return {value, slope};
}

bool regressive_on(const PeriodStructure& p, Complex g) {
  for (double mu : p.mus) {
    if (std::abs(1.0 + mu * g) <= kSnap) return false;
  }
  return true;
}

std::optional<Complex> damped_newton(const PeriodStructure& p, Complex guess, Complex target,
                                     std::vector<Complex>* refs, const ExponentOptions& opts) {
  Complex g = guess;
  const double scale = std::max(1.0, std::abs(target));
  auto [value, slope] = cylinder_map(p, g, target, refs);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (std::abs(value) <= opts.tol * scale) return g;
    if (std::abs(slope) == 0.0 || !std::isfinite(std::abs(slope))) return std::nullopt;
    const Complex step = value / slope;
    double damping = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half, damping *= 0.5) {
      const Complex trial = g - damping * step;
      if (!regressive_on(p, trial)) continue;
      auto [tv, ts] = cylinder_map(p, trial, target, refs);
      if (std::isfinite(std::abs(tv)) && std::abs(tv) < std::abs(value)) {
        g = trial;
        value = tv;
        slope = ts;
        improved = true;
        break;
      }
    }
    if (!improved) return std::abs(value) <= 1e3 * opts.tol * scale ? std::optional(g) : std::nullopt;
  }
  return std::abs(value) <= 1e3 * opts.tol * scale ? std::optional(g) : std::nullopt;
}

Complex period_exponential(const PeriodStructure& p, Complex g) {
  Complex out = std::exp(g * p.dense_length);
  for (double mu : p.mus) out *= 1.0 + mu * g;
  return out;
}

}  // namespace

FloquetExponent exponent_from_multiplier(Complex lambda, const ShiftSystem& sys,
                                         const TimeScaleWindow& ts, long k,
                                         const ExponentOptions& opts) {
  if (std::abs(lambda) < kSnap) {
    throw Error(ErrorCode::DegenerateMultiplier, "exponent of a zero multiplier");
  }
  FloquetExponent out;
  out.lambda = lambda;
  out.branch = k;
  out.t0 = sys.t0();
  out.t1 = one_period_end(ts, sys);
  const PeriodStructure p = period_structure(ts, out.t0, out.t1);
  const Complex target = std::log(lambda);

  std::optional<Complex> root;
  if (std::abs(lambda - 1.0) == 0.0) {
    root = Complex(0.0, 0.0);
  } else {
    root = damped_newton(p, (lambda - 1.0) / (out.t1 - out.t0), target, nullptr, opts);
  }
  if (!root) {
    // Continuation along lambda(s) = exp(s Log lambda), logs kept continuous.
    out.continued = true;
    std::vector<Complex> refs(p.mus.size(), Complex(0.0, 0.0));
    Complex g(0.0, 0.0);
    for (int step = 1; step <= opts.continuation_steps; ++step) {
      const double s = static_cast<double>(step) / opts.continuation_steps;
      auto next = damped_newton(p, g, s * target, &refs, opts);
      if (!next) {
        throw Error(ErrorCode::RootFindFailure,
                    "exponent continuation stalled at s=" + std::to_string(s));
      }
      g = *next;
      for (std::size_t j = 0; j < p.mus.size(); ++j) {
        refs[j] = nearest_branch(std::log(1.0 + p.mus[j] * g), refs[j]);
      }
    }
    root = g;
  }
  out.gamma0 = *root;
  if (!regressive_on(p, out.gamma0)) {
    throw Error(ErrorCode::RegressivityViolation, "1 + mu gamma0 vanishes at a period point");
  }
  out.residual = std::abs(period_exponential(p, out.gamma0) - lambda) / std::abs(lambda);
  if (!(out.residual <= 1e-8)) {
    throw Error(ErrorCode::RootFindFailure,
                "exponent residual " + std::to_string(out.residual) + " too large");
  }
  out.omega = 2.0 * std::numbers::pi * static_cast<double>(k) / (out.t1 - out.t0);
  for (double mu : p.mus) {
    if (!in_hilger_strip(out.omega, mu)) ++out.strip_violations;
  }
  return out;
}

// --------------------------------------------------------------------------
// Periodic solutions

Vector multiplier_eigenvector(const Matrix& M, Complex lambda) {
  const Eigen::Index n = M.rows();
  Eigen::JacobiSVD<Matrix> svd(M - lambda * Matrix::Identity(n, n), Eigen::ComputeFullV);
  Vector v = svd.matrixV().col(n - 1);
  // Fix the phase so the largest component is real and positive.
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  v *= std::abs(v(idx)) / v(idx);
  return v.normalized();
}

PeriodicSolution homogeneous_periodic_solution(const FloquetDecomposition& dec,
                                               std::optional<double> tol) {
  const double unit_tol = tol.value_or(dec.options().unit_tol);
  PeriodicSolution out;
  for (Complex lambda : dec.multipliers()) {
    if (std::abs(lambda - 1.0) < unit_tol) out.exists = true;
  }
  if (!out.exists) return out;
  // L(t0) = I, so x0 is the unit eigenvector itself.
  out.x0 = multiplier_eigenvector(dec.monodromy(), Complex(1.0, 0.0));
  out.residual = (dec.monodromy() * out.x0 - out.x0).norm();
  return out;
}

Vector nonhomogeneous_periodic_state(const MatrixFunction& A, const MatrixFunction& F,
                                     const TimeScaleWindow& ts, const ShiftSystem& sys,
                                     double tol, const TransitionOptions& opts) {
  const double t0 = sys.t0();
  const double t1 = one_period_end(ts, sys);
  const Eigen::Index n = A.rows();
  const Matrix M = transition_matrix(A, ts, t1, t0, opts);
  const Matrix gap = Matrix::Identity(n, n) - M;
  if (std::abs(gap.determinant()) < tol) {
    throw Error(ErrorCode::ResonantSystem,
                "det(I - M) vanishes; the homogeneous system has a periodic solution");
  }
  const Vector forced = variation_of_constants(A, F, ts, t1, t0, Vector::Zero(n), opts);
  return Eigen::PartialPivLU<Matrix>(gap).solve(forced);
}

Vector bloch_solution(const FloquetDecomposition& dec, Complex lambda, double t,
                      const std::optional<Vector>& u) {
  const Vector dir = u ? *u : multiplier_eigenvector(dec.monodromy(), lambda);
  // lambda^{Theta/T} is the scalar counterpart of e_R and stays consistent
  // with L where Theta jumps at left-dense anchors.
  const Complex growth = std::exp(std::log(lambda) * (dec.theta().theta(t) / dec.period()));
  return growth * (dec.L(t) * dir);
}

}  // namespace tsfloquet
