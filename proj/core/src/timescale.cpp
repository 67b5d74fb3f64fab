#include "tsfloquet/timescale.hpp"

#include <set>

namespace tsfloquet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PointNotInScale: return "PointNotInScale";
    case ErrorCode::WindowEdge: return "WindowEdge";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::ReversedBounds: return "ReversedBounds";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::IterationCapExceeded: return "IterationCapExceeded";
    case ErrorCode::RegressivityViolation: return "RegressivityViolation";
    case ErrorCode::OmegaOutOfStrip: return "OmegaOutOfStrip";
    case ErrorCode::IntegrationFailure: return "IntegrationFailure";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::ClusteringAmbiguous: return "ClusteringAmbiguous";
    case ErrorCode::DegenerateMultiplier: return "DegenerateMultiplier";
    case ErrorCode::RootFindFailure: return "RootFindFailure";
    case ErrorCode::ResonantSystem: return "ResonantSystem";
    case ErrorCode::EmptyHorizon: return "EmptyHorizon";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

TimeScaleWindow::TimeScaleWindow(std::vector<TimeCell> cells, std::string name,
                                 std::map<std::string, double> params, double snap)
    : cells_(std::move(cells)), name_(std::move(name)), params_(std::move(params)), snap_(snap) {
  if (cells_.empty()) {
    throw Error(ErrorCode::ConfigError, "time scale window '" + name_ + "' has no cells");
  }
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const TimeCell& c = cells_[k];
    if (!(c.lo <= c.hi) || !std::isfinite(c.lo) || !std::isfinite(c.hi)) {
      throw Error(ErrorCode::ConfigError, "cell " + std::to_string(k) + " has lo > hi");
    }
    if (k > 0 && !(cells_[k - 1].hi < c.lo)) {
      throw Error(ErrorCode::ConfigError,
                  "cells " + std::to_string(k - 1) + " and " + std::to_string(k) +
                      " overlap or are out of order");
    }
  }
}

TimeScaleWindow TimeScaleWindow::real(double lo, double hi) {
  return TimeScaleWindow({{lo, hi}}, "real");
}

TimeScaleWindow TimeScaleWindow::integer(double lo, double hi) {
  std::vector<TimeCell> cells;
  for (double n = std::ceil(lo - 1e-9); n <= hi + 1e-9; n += 1.0) cells.push_back({n, n});
  return TimeScaleWindow(std::move(cells), "integer");
}

TimeScaleWindow TimeScaleWindow::q_scale(double q, double lo, double hi) {
  if (!(q > 1.0) || !(lo > 0.0)) {
    throw Error(ErrorCode::ConfigError, "q_scale needs q > 1 and a positive lower bound");
  }
  const double lq = std::log(q);
  const int k0 = static_cast<int>(std::ceil(std::log(lo) / lq - 1e-9));
  const int k1 = static_cast<int>(std::floor(std::log(hi) / lq + 1e-9));
  std::vector<TimeCell> cells;
  for (int k = k0; k <= k1; ++k) {
    const double p = std::pow(q, k);
    cells.push_back({p, p});
  }
  return TimeScaleWindow(std::move(cells), "q_scale", {{"q", q}});
}

TimeScaleWindow TimeScaleWindow::geometric_union(double q, double c, double lo, double hi) {
  if (!(q > 1.0) || !(c > 1.0) || !(c < q) || !(lo > 0.0)) {
    throw Error(ErrorCode::ConfigError, "geometric_union needs 1 < c < q and a positive lower bound");
  }
  const double lq = std::log(q);
  const int k0 = static_cast<int>(std::ceil(std::log(lo) / lq - 1e-9));
  const int k1 = static_cast<int>(std::floor(std::log(hi) / lq + 1e-9));
  std::vector<TimeCell> cells;
  for (int k = k0; k <= k1; ++k) {
    const double p = std::pow(q, k);
    cells.push_back({p, c * p});
  }
  return TimeScaleWindow(std::move(cells), "geometric_union", {{"q", q}, {"c", c}});
}

TimeScaleWindow TimeScaleWindow::sqrt_naturals(double lo, double hi) {
  std::vector<TimeCell> cells;
  const double n0 = std::ceil(std::max(0.0, lo) * std::max(0.0, lo) - 1e-9);
  for (double n = n0; n <= hi * hi + 1e-9; n += 1.0) {
    const double p = std::sqrt(n);
    cells.push_back({p, p});
  }
  return TimeScaleWindow(std::move(cells), "sqrt_naturals");
}

TimeScaleWindow TimeScaleWindow::signed_squares(double lo, double hi) {
  std::set<double> pts;
  const double nmax = std::ceil(std::sqrt(std::max(std::abs(lo), std::abs(hi)))) + 1.0;
  for (double n = 0.0; n <= nmax; n += 1.0) {
    for (double p : {n * n, -n * n}) {
      if (p >= lo - 1e-9 && p <= hi + 1e-9) pts.insert(p);
    }
  }
  std::vector<TimeCell> cells;
  for (double p : pts) cells.push_back({p, p});
  return TimeScaleWindow(std::move(cells), "signed_squares");
}

TimeScaleWindow TimeScaleWindow::logistic(double q, int n_min, int n_max) {
  if (!(q > 1.0) || n_min > n_max) {
    throw Error(ErrorCode::ConfigError, "logistic needs q > 1 and n_min <= n_max");
  }
  std::vector<TimeCell> cells;
  for (int n = n_min; n <= n_max; ++n) {
    const double p = std::pow(q, n);
    const double x = p / (1.0 + p);
    cells.push_back({x, x});
  }
  return TimeScaleWindow(std::move(cells), "logistic", {{"q", q}});
}

std::optional<std::size_t> TimeScaleWindow::locate(double t) const {
  const double tol = snap_at(t, snap_);
  auto it = std::lower_bound(cells_.begin(), cells_.end(), t,
                             [tol](const TimeCell& c, double x) { return c.hi < x - tol; });
  if (it == cells_.end() || it->lo > t + tol) return std::nullopt;
  return static_cast<std::size_t>(it - cells_.begin());
}

bool TimeScaleWindow::contains(double t) const { return locate(t).has_value(); }

double TimeScaleWindow::snap_point(double t) const {
  const auto k = locate(t);
  if (!k) return t;
  const TimeCell& c = cells_[*k];
  const double tol = snap_at(t, snap_);
  if (std::abs(t - c.lo) <= tol) return c.lo;
  if (std::abs(t - c.hi) <= tol) return c.hi;
  return t;
}

void TimeScaleWindow::require_member(double t, const char* op) const {
  if (!contains(t)) {
    throw Error(ErrorCode::PointNotInScale,
                std::string(op) + ": t=" + std::to_string(t) + " is not in '" + name_ + "'");
  }
}

JumpInfo TimeScaleWindow::jump(double t) const {
  require_member(t, "jump");
  const std::size_t k = *locate(t);
  const TimeCell& c = cells_[k];
  const double tt = snap_point(t);
  if (tt < c.hi) return JumpInfo{tt, 0.0, PointClass::RightDense, false};
  if (k + 1 == cells_.size()) return JumpInfo{tt, 0.0, PointClass::RightDense, true};
  const double s = cells_[k + 1].lo;
  return JumpInfo{s, s - tt, PointClass::RightScattered, false};
}

double TimeScaleWindow::rho(double t) const {
  require_member(t, "rho");
  const std::size_t k = *locate(t);
  const double tt = snap_point(t);
  if (tt > cells_[k].lo || k == 0) return tt;
  return cells_[k - 1].hi;
}

std::vector<Piece> TimeScaleWindow::pieces(double a, double b) const {
  require_member(a, "pieces");
  require_member(b, "pieces");
  const double aa = snap_point(a);
  const double bb = snap_point(b);
  std::vector<Piece> out;
  if (!(aa < bb)) return out;
  const std::size_t ka = *locate(aa);
  const std::size_t kb = *locate(bb);
  for (std::size_t k = ka; k <= kb; ++k) {
    const TimeCell& c = cells_[k];
    const double lo = std::max(c.lo, aa);
    const double hi = std::min(c.hi, bb);
    if (hi > lo) out.push_back(Piece{lo, hi, 0.0});
    if (c.hi < bb && c.hi >= aa && k + 1 < cells_.size()) {
      out.push_back(Piece{c.hi, c.hi, cells_[k + 1].lo - c.hi});
    }
  }
  return out;
}

std::vector<double> TimeScaleWindow::sample(double a, double b, std::size_t count) const {
  require_member(a, "sample");
  require_member(b, "sample");
  const double aa = snap_point(a);
  const double bb = snap_point(b);
  std::vector<double> out;
  if (count == 0 || aa > bb) return out;

  std::vector<double> structure{aa};
  std::vector<std::pair<double, double>> dense;
  double dense_len = 0.0;
  for (const TimeCell& c : cells_) {
    if (c.hi < aa || c.lo > bb) continue;
    const double lo = std::max(c.lo, aa);
    const double hi = std::min(c.hi, bb);
    structure.push_back(lo);
    structure.push_back(hi);
    if (hi > lo) {
      dense.emplace_back(lo, hi);
      dense_len += hi - lo;
    }
  }
  const double top = max();
  std::sort(structure.begin(), structure.end());
  structure.erase(std::unique(structure.begin(), structure.end()), structure.end());
  std::erase_if(structure, [top](double x) { return x >= top; });

  if (structure.size() >= count || dense_len == 0.0) {
    const std::size_t n = std::min(count, structure.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = (n == 1) ? 0 : (i * (structure.size() - 1)) / (n - 1);
      out.push_back(structure[idx]);
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  out = structure;
  std::size_t remaining = count - structure.size();
  std::vector<std::size_t> per(dense.size(), 0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    per[i] = static_cast<std::size_t>(
        std::floor(static_cast<double>(remaining) * (dense[i].second - dense[i].first) / dense_len));
    assigned += per[i];
  }
  for (std::size_t i = 0; assigned < remaining; i = (i + 1) % dense.size()) {
    ++per[i];
    ++assigned;
  }
  for (std::size_t i = 0; i < dense.size(); ++i) {
    const auto [lo, hi] = dense[i];
    for (std::size_t j = 1; j <= per[i]; ++j) {
      out.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(per[i] + 1));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace tsfloquet
