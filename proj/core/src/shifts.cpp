#include "tsfloquet/shifts.hpp"

#include <algorithm>
#include <cmath>

namespace tsfloquet {
namespace {

bool close(double a, double b, double rtol) {
  return std::abs(a - b) <= rtol * std::max({1.0, std::abs(a), std::abs(b)});
}

double logit(double x) { return std::log(x / (1.0 - x)); }
double logistic_inv(double y) { return 1.0 / (1.0 + std::exp(-y)); }

const char* dir_name(ShiftDirection dir) {
  return dir == ShiftDirection::Forward ? "+" : "-";
}

}  // namespace

ShiftSystem::ShiftSystem(Parts parts) : parts_(std::move(parts)) {
  if (!parts_.forward || !parts_.backward) {
    throw Error(ErrorCode::ConfigError, "shift system '" + parts_.kind + "' needs both maps");
  }
  if (!parts_.domain_forward) parts_.domain_forward = [](double, double) { return true; };
  if (!parts_.domain_backward) parts_.domain_backward = [](double, double) { return true; };
  if (!parts_.in_star) parts_.in_star = [](double) { return true; };
  if (!(parts_.period > parts_.t0)) {
    throw Error(ErrorCode::ConfigError, "period T=" + std::to_string(parts_.period) +
                                            " must exceed t0=" + std::to_string(parts_.t0));
  }
}

ShiftSystem ShiftSystem::with_period(double T) const {
  Parts p = parts_;
  p.period = T;
  return ShiftSystem(std::move(p));
}

ShiftSystem ShiftSystem::additive(double T) {
  Parts p;
  p.kind = "additive";
  p.t0 = 0.0;
  p.period = T;
  p.forward = [](double s, double t) { return t + s; };
  p.backward = [](double s, double t) { return t - s; };
  p.analytic_shift_dderiv = [](ShiftDirection, double, double) { return 1.0; };
  p.backward_ds = [](double, double) { return -1.0; };
  return ShiftSystem(std::move(p));
}

ShiftSystem ShiftSystem::multiplicative(double T) {
  Parts p;
  p.kind = "multiplicative";
  p.t0 = 1.0;
  p.period = T;
  p.forward = [](double s, double t) { return t > 0.0 ? s * t : t / s; };
  p.backward = [](double s, double t) { return t > 0.0 ? t / s : t * s; };
  p.domain_forward = [](double s, double t) { return s > 0.0 && t != 0.0; };
  p.domain_backward = p.domain_forward;
  p.in_star = [](double t) { return t != 0.0; };
  p.analytic_shift_dderiv = [](ShiftDirection dir, double T, double t) {
    const bool up = (dir == ShiftDirection::Forward) == (t > 0.0);
    return up ? T : 1.0 / T;
  };
  p.backward_ds = [](double s, double u) { return u > 0.0 ? -u / (s * s) : u; };
  return ShiftSystem(std::move(p));
}

ShiftSystem ShiftSystem::sqrt_shift(double T) {
  Parts p;
  p.kind = "sqrt";
  p.t0 = 0.0;
  p.period = T;
  p.forward = [](double s, double t) { return std::sqrt(t * t + s * s); };
  p.backward = [](double s, double t) { return std::sqrt(t * t - s * s); };
  p.domain_forward = [](double s, double t) { return s >= 0.0 && t >= 0.0; };
  p.domain_backward = [](double s, double t) { return s >= 0.0 && t >= s; };
  p.in_star = [](double t) { return t >= 0.0; };
  p.backward_ds = [](double s, double u) { return -s / std::sqrt(u * u - s * s); };
  return ShiftSystem(std::move(p));
}

ShiftSystem ShiftSystem::signed_squares(double T) {
  Parts p;
  p.kind = "signed_squares";
  p.t0 = 0.0;
  p.period = T;
  p.forward = [](double s, double t) {
    if (t > 0.0) return std::pow(std::sqrt(t) + std::sqrt(s), 2);
    if (t == 0.0) return s;
    return -std::pow(std::sqrt(-t) + std::sqrt(s), 2);
  };
  p.backward = [](double s, double t) {
    if (t > 0.0) return std::pow(std::sqrt(t) - std::sqrt(s), 2);
    if (t == 0.0) return -s;
    return -std::pow(std::sqrt(-t) - std::sqrt(s), 2);
  };
  p.domain_forward = [](double s, double) { return s >= 0.0; };
  // delta_-(s, 0) = -s has no forward preimage, so 0 is excluded for s > 0.
  p.domain_backward = [](double s, double t) { return s >= 0.0 && (t < 0.0 || t >= s); };
  p.backward_ds = [](double s, double u) {
    if (u > 0.0) return -(std::sqrt(u) - std::sqrt(s)) / std::sqrt(s);
    return -(std::sqrt(-u) - std::sqrt(s)) / std::sqrt(s);
  };
  return ShiftSystem(std::move(p));
}

ShiftSystem ShiftSystem::logistic(double T) {
  Parts p;
  p.kind = "logistic";
  p.t0 = 0.5;
  p.period = T;
  p.forward = [](double s, double t) { return logistic_inv(logit(t) + logit(s)); };
  p.backward = [](double s, double t) { return logistic_inv(logit(t) - logit(s)); };
  auto unit = [](double s, double t) { return s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0; };
  p.domain_forward = unit;
  p.domain_backward = unit;
  p.in_star = [](double t) { return t > 0.0 && t < 1.0; };
  p.backward_ds = [](double s, double u) {
    const double v = logistic_inv(logit(u) - logit(s));
    return -v * (1.0 - v) / (s * (1.0 - s));
  };
  return ShiftSystem(std::move(p));
}

ShiftSystem ShiftSystem::custom(double t0, double T, const Expr& forward, const Expr& backward,
                                ParamMap params) {
  auto as_map = [params](const Expr& e) {
    return [e, params](double s, double t) {
      ParamMap vars = params;
      vars["s"] = s;
      return e.eval(t, vars);
    };
  };
  auto as_domain = [](Map m) {
    return [m](double s, double t) {
      try {
        return std::isfinite(m(s, t));
      } catch (const Error&) {
        return false;
      }
    };
  };
  Parts p;
  p.kind = "custom";
  p.t0 = t0;
  p.period = T;
  p.forward = as_map(forward);
  p.backward = as_map(backward);
  p.domain_forward = as_domain(p.forward);
  p.domain_backward = as_domain(p.backward);
  return ShiftSystem(std::move(p));
}

bool ShiftSystem::in_domain(ShiftDirection dir, double s, double t) const {
  return dir == ShiftDirection::Forward ? parts_.domain_forward(s, t)
                                        : parts_.domain_backward(s, t);
}

bool ShiftSystem::in_star(double t) const { return parts_.in_star(t); }

double ShiftSystem::shift(ShiftDirection dir, double s, double t) const {
  if (!in_domain(dir, s, t)) {
    throw Error(ErrorCode::OutOfDomain, "delta" + std::string(dir_name(dir)) + "(" +
                                            std::to_string(s) + ", " + std::to_string(t) +
                                            ") for shift '" + parts_.kind + "'");
  }
  return dir == ShiftDirection::Forward ? parts_.forward(s, t) : parts_.backward(s, t);
}

double ShiftSystem::iterate(ShiftDirection dir, double T, std::size_t k, double t) const {
  double x = t;
  for (std::size_t i = 0; i < k; ++i) {
    if (!in_domain(dir, T, x)) {
      throw Error(ErrorCode::OutOfDomain, "iterated shift left the domain at step " +
                                              std::to_string(i + 1) + " (t=" +
                                              std::to_string(x) + ")");
    }
    x = dir == ShiftDirection::Forward ? parts_.forward(T, x) : parts_.backward(T, x);
  }
  return x;
}

std::optional<double> ShiftSystem::analytic_shift_dderiv(ShiftDirection dir, double T,
                                                         double t) const {
  if (!parts_.analytic_shift_dderiv) return std::nullopt;
  return parts_.analytic_shift_dderiv(dir, T, t);
}

std::optional<double> ShiftSystem::backward_ds(double s, double u) const {
  if (!parts_.backward_ds) return std::nullopt;
  return parts_.backward_ds(s, u);
}

double shift_delta_derivative(const ShiftSystem& sys, const TimeScaleWindow& ts,
                              ShiftDirection dir, double T, double t) {
  if (ts.jump(t).window_edge) {
    throw Error(ErrorCode::WindowEdge,
                "shift derivative at window maximum t=" + std::to_string(t));
  }
  if (auto d = sys.analytic_shift_dderiv(dir, T, t)) return *d;
  return delta_derivative([&](double x) { return sys.shift(dir, T, x); }, ts, t);
}

// --------------------------------------------------------------------------
// ThetaTable

ThetaTable::ThetaTable(ShiftSystem sys, std::size_t cap) : sys_(std::move(sys)), cap_(cap) {
  anchors_.push_back(sys_.t0());
  cumulative_.push_back(0.0);
}

void ThetaTable::extend_to(std::size_t k) const {
  if (k > cap_) {
    throw Error(ErrorCode::IterationCapExceeded,
                "period counter exceeds cap " + std::to_string(cap_));
  }
  const double T = sys_.period();
  while (anchors_.size() <= k) {
    const double prev = anchors_.back();
    if (!sys_.in_domain(ShiftDirection::Forward, T, prev)) {
      throw Error(ErrorCode::OutOfDomain,
                  "anchor " + std::to_string(anchors_.size()) + " leaves the shift domain");
    }
    const double next = sys_.forward(T, prev);
    if (!(next > prev)) {
      throw Error(ErrorCode::OutOfDomain,
                  "forward shift does not advance at anchor " + std::to_string(prev));
    }
    anchors_.push_back(next);
    cumulative_.push_back(cumulative_.back() + sys_.backward(prev, next));
  }
}

void ThetaTable::extend_past(double t) const {
  const double tol = snap_at(t);
  while (anchors_.back() < t - tol) extend_to(anchors_.size());
}

double ThetaTable::anchor(std::size_t k) const {
  std::lock_guard lock(mutex_);
  extend_to(k);
  return anchors_[k];
}

double ThetaTable::increment(std::size_t j) const {
  std::lock_guard lock(mutex_);
  extend_to(j);
  return cumulative_[j] - cumulative_[j - 1];
}

double ThetaTable::anchor_theta(std::size_t k) const {
  std::lock_guard lock(mutex_);
  extend_to(k);
  return cumulative_[k];
}

std::size_t ThetaTable::m(double t) const {
  std::lock_guard lock(mutex_);
  extend_past(t);
  const double tol = snap_at(t);
  auto it = std::lower_bound(anchors_.begin(), anchors_.end(), t - tol);
  return static_cast<std::size_t>(it - anchors_.begin());
}

std::optional<std::size_t> ThetaTable::anchor_index(double t) const {
  const std::size_t k = m(t);
  std::lock_guard lock(mutex_);
  if (std::abs(anchors_[k] - t) <= snap_at(t)) return k;
  return std::nullopt;
}

double ThetaTable::theta(double t) const {
  if (t < sys_.t0() - snap_at(sys_.t0())) {
    throw Error(ErrorCode::OutOfDomain, "Theta needs t >= t0, got t=" + std::to_string(t));
  }
  const std::size_t k = m(t);
  std::lock_guard lock(mutex_);
  const double a = anchors_[k];
  if (std::abs(a - t) <= snap_at(t)) return cumulative_[k];
  return cumulative_[k] - sys_.backward(t, a);
}

double ThetaTable::theta_derivative(double t) const {
  std::size_t k = m(t);
  if (anchor_index(t)) ++k;
  const double a = anchor(k);
  if (auto d = sys_.backward_ds(t, a)) return -*d;
  const double h = 1e-6 * std::max(1.0, std::abs(t));
  auto g = [&](double s) { return sys_.backward(s, a); };
  if (sys_.in_domain(ShiftDirection::Backward, t - h, a)) {
    return -(g(t + h) - g(t - h)) / (2.0 * h);
  }
  return -(-3.0 * g(t) + 4.0 * g(t + h) - g(t + 2.0 * h)) / (2.0 * h);
}

// --------------------------------------------------------------------------
// Periodicity verification

namespace {

struct Checker {
  PeriodicityReport report;
  double rtol;

  void expect_close(const char* name, double s, double t, double got, double want) {
    ++report.checked;
    if (!close(got, want, rtol) || !std::isfinite(got)) {
      report.pass = false;
      report.violations.push_back(Violation{name, s, t, std::abs(got - want)});
    }
  }
  void expect(const char* name, double s, double t, bool ok, double residual = 0.0) {
    ++report.checked;
    if (!ok) {
      report.pass = false;
      report.violations.push_back(Violation{name, s, t, residual});
    }
  }
};

constexpr ShiftDirection kDirs[] = {ShiftDirection::Forward, ShiftDirection::Backward};

void check_scale(const ShiftSystem& sys, const TimeScaleWindow& ts, double t, Checker& c) {
  const double T = sys.period();
  if (!ts.contains(t) || !sys.in_star(t)) return;
  for (ShiftDirection dir : kDirs) {
    if (!sys.in_domain(dir, T, t)) continue;
    const double u = sys.shift(dir, T, t);
    if (u > ts.max() + snap_at(u) || u < ts.min() - snap_at(u)) continue;
    const bool member = ts.contains(u) && sys.in_star(u);
    c.expect(dir == ShiftDirection::Forward ? "scale.member+" : "scale.member-", T, t, member);
    if (!member) continue;
    const JumpInfo jt = ts.jump(t);
    const JumpInfo ju = ts.jump(u);
    if (jt.window_edge || ju.window_edge) continue;
    if (!sys.in_domain(dir, T, jt.sigma)) continue;
    const double lhs = sys.shift(dir, T, jt.sigma);
    if (lhs > ts.max() + snap_at(lhs) || lhs < ts.min() - snap_at(lhs)) continue;
    c.expect_close(dir == ShiftDirection::Forward ? "scale.sigma+" : "scale.sigma-", T, t, lhs,
                   ju.sigma);
  }
}

}  // namespace

PeriodicityReport verify_shift_axioms(const ShiftSystem& sys,
                                      std::span<const std::pair<double, double>> pairs,
                                      double rtol) {
  Checker c{{}, rtol};
  const double t0 = sys.t0();
  const auto F = ShiftDirection::Forward;
  const auto B = ShiftDirection::Backward;
  auto dom = [&](ShiftDirection d, double s, double t) { return sys.in_domain(d, s, t); };
  auto sh = [&](ShiftDirection d, double s, double t) { return sys.shift(d, s, t); };

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [s, t] = pairs[i];
    const auto [u, v] = pairs[(i + 1) % pairs.size()];
    if (s < t0 || !sys.in_star(t)) continue;

    // delta_+(s, t0) = s and delta_+(t0, t) = t.
    if (dom(F, s, t0)) c.expect_close("axiom3.shift_of_t0", s, t, sh(F, s, t0), s);
    if (dom(F, t0, t)) c.expect_close("axiom3.zero_shift", s, t, sh(F, t0, t), t);

    for (ShiftDirection d : kDirs) {
      const ShiftDirection o = d == F ? B : F;
      if (dom(d, s, t)) {
        const double w = sh(d, s, t);
        if (dom(o, s, w)) c.expect_close("axiom4.inverse", s, t, sh(o, s, w), t);
        // Commutation of forward and backward shifts.
        if (u >= t0 && dom(o, u, w) && dom(o, u, t) && dom(d, s, sh(o, u, t))) {
          c.expect_close("axiom5.commute", s, t, sh(o, u, w), sh(d, s, sh(o, u, t)));
        }
      }
      // Strictly increasing in the second argument.
      if (sys.in_star(v) && t != v && dom(d, s, t) && dom(d, s, v)) {
        const double lo = std::min(t, v), hi = std::max(t, v);
        c.expect("axiom1.monotone_t", s, t, sh(d, s, lo) < sh(d, s, hi));
      }
      // Forward increasing, backward decreasing in the shift amount.
      if (u >= t0 && u != s && dom(d, s, t) && dom(d, u, t)) {
        const double s1 = std::min(s, u), s2 = std::max(s, u);
        const bool ok = d == F ? sh(F, s1, t) < sh(F, s2, t) : sh(B, s1, t) > sh(B, s2, t);
        c.expect(d == F ? "axiom2.monotone_s+" : "axiom2.monotone_s-", s, t, ok);
      }
    }

    // Corollary identities.
    if (dom(B, s, s)) c.expect_close("lemma1.self_back", s, t, sh(B, s, s), t0);
    if (dom(B, t0, t)) c.expect_close("lemma2.zero_back", s, t, sh(B, t0, t), t);
    if (t >= t0 && dom(F, s, t) && dom(B, s, t0) && dom(F, t, sh(B, s, t0)) && dom(B, s, t)) {
      c.expect_close("lemma4", s, t, sh(F, t, sh(B, s, t0)), sh(B, s, t));
    }
    if (t >= t0 && dom(F, s, t) && dom(F, t, s)) {
      c.expect_close("lemma5.symmetric", s, t, sh(F, s, t), sh(F, t, s));
    }
    if (t >= t0 && dom(F, s, t)) c.expect("lemma6.forward_stays", s, t, sh(F, s, t) >= t0);
    if (t >= s && dom(B, s, t)) {
      c.expect("lemma7.backward_stays", s, t, sh(B, s, t) >= t0 - snap_at(t0));
    }
    // delta_+(delta_-(a, b), delta_-(b, c)) = delta_-(a, c) for t0 <= a <= b <= c.
    {
      double abc[] = {s, u, t};
      std::sort(std::begin(abc), std::end(abc));
      const double a = abc[0], b = abc[1], cc = abc[2];
      if (a >= t0 && dom(B, a, b) && dom(B, b, cc) && dom(B, a, cc)) {
        const double x = sh(B, a, b), y = sh(B, b, cc);
        if (dom(F, x, y)) c.expect_close("lemma9", a, cc, sh(F, x, y), sh(B, a, cc));
      }
    }
  }
  return c.report;
}

PeriodicityReport verify_periodicity(const ShiftSystem& sys, const TimeScaleWindow& ts,
                                     PeriodicityMode mode, std::span<const double> samples,
                                     const ScalarFn& f, double rtol) {
  const double T = sys.period();
  if (mode == PeriodicityMode::Axioms) {
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> amounts;
    for (double x : samples) {
      if (x >= sys.t0()) amounts.push_back(x);
    }
    if (amounts.empty()) amounts.push_back(T);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      pairs.emplace_back(amounts[(i * 7 + 3) % amounts.size()], samples[i]);
      pairs.emplace_back(T, samples[i]);
    }
    return verify_shift_axioms(sys, pairs, rtol);
  }

  Checker c{{}, rtol};
  if ((mode == PeriodicityMode::Function || mode == PeriodicityMode::DeltaFunction) && !f) {
    throw Error(ErrorCode::ConfigError, "function periodicity check needs a function");
  }
  for (double t : samples) {
    if (mode == PeriodicityMode::Scale) {
      check_scale(sys, ts, t, c);
      continue;
    }
    if (!sys.in_star(t)) continue;
    const bool plain = mode == PeriodicityMode::Function;
    double ft = 0.0;
    try {
      ft = f(t);
    } catch (const Error&) {
      // An undefined value is a violation, not a failure of the check.
      c.expect(plain ? "function.eval" : "delta_function.eval", T, t, false);
      continue;
    }
    for (ShiftDirection dir : kDirs) {
      if (!sys.in_domain(dir, T, t)) continue;
      const double u = sys.shift(dir, T, t);
      if (!sys.in_star(u)) continue;
      const bool fwd = dir == ShiftDirection::Forward;
      double fu = 0.0;
      try {
        fu = f(u);
      } catch (const Error&) {
        c.expect(plain ? "function.eval" : "delta_function.eval", T, u, false);
        continue;
      }
      if (plain) {
        c.expect_close(fwd ? "function+" : "function-", T, t, fu, ft);
      } else {
        if (!ts.contains(t) || ts.jump(t).window_edge) continue;
        const double d = shift_delta_derivative(sys, ts, dir, T, t);
        c.expect_close(fwd ? "delta_function+" : "delta_function-", T, t, fu * d, ft);
      }
    }
  }
  return c.report;
}

std::vector<double> periodicity_samples(const ShiftSystem& sys, const TimeScaleWindow& ts,
                                        std::size_t count) {
  std::vector<double> out;
  for (double t : ts.sample(ts.min(), ts.max(), count)) {
    if (sys.in_star(t)) out.push_back(t);
  }
  return out;
}

}  // namespace tsfloquet
