#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tsfloquet/analysis.hpp"

namespace tsfloquet {

using nlohmann::json;

namespace {

/// Runs one pipeline stage and prefixes any library error with its name.
template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), name + ": " + e.detail());
  }
}

double finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, std::string(what) + " is not finite");
  return v;
}

json complex_json(Complex z) {
  return json{{"re", finite(z.real(), "real part")}, {"im", finite(z.imag(), "imaginary part")}};
}

json matrix_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ir = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(finite(m(i, j).real(), "matrix entry"));
      ir.push_back(finite(m(i, j).imag(), "matrix entry"));
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  return json{{"re", re}, {"im", im}};
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

json periodicity_json(const PeriodicityReport& r) {
  json violations = json::array();
  constexpr std::size_t kListed = 50;
  for (std::size_t i = 0; i < r.violations.size() && i < kListed; ++i) {
    const Violation& v = r.violations[i];
    violations.push_back({{"check", v.check},
                          {"s", v.s},
                          {"t", v.t},
                          {"residual", std::isfinite(v.residual) ? json(v.residual) : json()}});
  }
  return json{{"pass", r.pass},
              {"checked", r.checked},
              {"violation_count", r.violations.size()},
              {"violations", violations}};
}

/// Merges the entrywise reports of a matrix-valued function.
PeriodicityReport entrywise_report(const std::vector<std::vector<std::string>>& entries,
                                   const ParamMap& params, const ShiftSystem& sys,
                                   const TimeScaleWindow& ts, std::span<const double> samples,
                                   double rtol, const std::string& label) {
  PeriodicityReport merged;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = 0; j < entries[i].size(); ++j) {
      const ScalarFn f = Expr::parse(entries[i][j]).bind(params);
      PeriodicityReport r =
          verify_periodicity(sys, ts, PeriodicityMode::DeltaFunction, samples, f, rtol);
      merged.checked += r.checked;
      merged.pass = merged.pass && r.pass;
      for (Violation& v : r.violations) {
        v.check = label + "[" + std::to_string(i) + "]" +
                  (entries[i].size() > 1 ? "[" + std::to_string(j) + "]" : "") + "." + v.check;
        merged.violations.push_back(std::move(v));
      }
    }
  }
  return merged;
}

std::vector<std::vector<std::string>> as_column(const std::vector<std::string>& v) {
  std::vector<std::vector<std::string>> out;
  for (const auto& e : v) out.push_back({e});
  return out;
}

/// Greedy multiset distance between two equally sized lists.
double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  double worst = 0.0;
  for (Complex x : a) {
    auto best = std::min_element(b.begin(), b.end(), [&](Complex p, Complex q) {
      return std::abs(p - x) < std::abs(q - x);
    });
    worst = std::max(worst, std::abs(*best - x));
    b.erase(best);
  }
  return worst;
}

std::vector<Complex> eigenvalues_of(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> solver(m, false);
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) out.push_back(solver.eigenvalues()(i));
  return out;
}

double relative(double err, double scale) { return err / std::max(1.0, scale); }

}  // namespace

AnalysisReport verify_config(const AnalysisConfig& cfg) {
  AnalysisReport rep;
  rep.config = cfg;
  const TimeScaleWindow ts = build_timescale(cfg.timescale);
  const ShiftSystem sys = build_shifts(cfg.shifts);
  build_matrix(cfg.system);
  build_forcing(cfg.system);
  const double rtol = cfg.analysis.tolerances.periodicity;

  stage("periodicity", [&] {
    const auto samples = periodicity_samples(sys, ts, cfg.analysis.periodicity_samples);
    rep.periodicity.push_back(
        {"scale", verify_periodicity(sys, ts, PeriodicityMode::Scale, samples, {}, rtol)});
    rep.periodicity.push_back(
        {"axioms", verify_periodicity(sys, ts, PeriodicityMode::Axioms, samples, {}, rtol)});
    rep.periodicity.push_back(
        {"A", entrywise_report(cfg.system.A, cfg.system.params, sys, ts, samples, rtol, "A")});
    if (!cfg.system.F.empty()) {
      rep.periodicity.push_back({"F", entrywise_report(as_column(cfg.system.F), cfg.system.params,
                                                       sys, ts, samples, rtol, "F")});
    }
  });
  for (const auto& section : rep.periodicity) {
    rep.periodicity_pass = rep.periodicity_pass && section.report.pass;
  }
  return rep;
}

AnalysisReport run_analysis(const AnalysisConfig& cfg) {
  AnalysisReport rep = verify_config(cfg);
  if (!rep.periodicity_pass) return rep;

  const Tolerances& tol = cfg.analysis.tolerances;
  TimeScaleWindow ts = build_timescale(cfg.timescale);
  const ShiftSystem sys = build_shifts(cfg.shifts);
  const MatrixFunction A = build_matrix(cfg.system);
  const auto F = build_forcing(cfg.system);
  const Eigen::Index n = A.rows();

  FloquetOptions fopts;
  fopts.transition.rel_tol = tol.ode;
  fopts.spectral.cluster_tol = tol.eigen;
  fopts.unit_tol = tol.resonance;
  const FloquetDecomposition dec =
      stage("floquet.monodromy", [&] { return FloquetDecomposition(A, ts, sys, fopts); });
  const SpectralData& spectral = dec.spectral();
  for (Complex lambda : spectral.eigenvalues) rep.cluster_multipliers.push_back(lambda);

  json body;
  body["monodromy"] = matrix_json(dec.monodromy());
  json mults = json::array();
  for (Complex lambda : dec.multipliers()) mults.push_back(complex_json(lambda));
  body["multipliers"] = mults;
  body["period"] = {{"t0", dec.t0()}, {"t1", dec.t1()}, {"T", dec.period()}};

  // Sample table and decomposition residuals.
  const double t_end = std::min(cfg.analysis.t_max.value_or(ts.max()), ts.max());
  std::vector<double> samples;
  for (double t : ts.sample(dec.t0(), t_end, cfg.analysis.samples)) {
    if (t >= dec.t0() && !ts.jump(t).window_edge) samples.push_back(t);
  }
  if (samples.empty()) throw Error(ErrorCode::EmptyHorizon, "no samples between t0 and t_max");

  double decomposition_residual = 0.0;
  double periodicity_residual = 0.0;
  double spectral_mapping_residual = 0.0;
  std::size_t periodicity_checked = 0;
  stage("floquet.decomposition", [&] {
    for (double t : samples) {
      SampleRow row;
      const JumpInfo j = ts.jump(t);
      row.t = t;
      row.sigma = j.sigma;
      row.mu = j.mu;
      row.theta = dec.theta().theta(t);
      row.phi = dec.phi(t);
      row.e_R = dec.e_R(t);
      row.L = row.phi * dec.e_R_inverse(t);
      row.lambda_ratio = dec.lambda_ratio(t);
      for (Complex lambda : spectral.eigenvalues) {
        row.re_mu.push_back(re_mu(dec.multiplier_path(lambda, t), j.mu));
      }
      decomposition_residual = std::max(
          decomposition_residual, relative((row.phi - row.L * row.e_R).norm(), row.phi.norm()));

      std::vector<Complex> paths;
      for (std::size_t i = 0; i < spectral.clusters(); ++i) {
        const Complex e = scalar_exp([&](double x) { return dec.multiplier_path(spectral.eigenvalues[i], x); },
                                     ts, t, dec.t0());
        for (int r = 0; r < spectral.multiplicities[i]; ++r) paths.push_back(e);
      }
      spectral_mapping_residual =
          std::max(spectral_mapping_residual, multiset_distance(eigenvalues_of(row.e_R), paths));

      const double shifted = sys.advance(t);
      if (shifted <= ts.max() - snap_at(shifted, ts.snap()) && ts.contains(shifted)) {
        const Matrix L_shift = dec.L(shifted);
        periodicity_residual =
            std::max(periodicity_residual, relative((L_shift - row.L).norm(), row.L.norm()));
        ++periodicity_checked;
      }
      rep.rows.push_back(std::move(row));
    }
  });
  body["decomposition_residuals"] = {
      {"phi_minus_L_eR", finite(decomposition_residual, "decomposition residual")},
      {"L_periodicity", finite(periodicity_residual, "periodicity residual")},
      {"L_periodicity_samples", periodicity_checked},
      {"spectral_mapping", finite(spectral_mapping_residual, "spectral mapping residual")}};

  json clusters = json::array();
  for (std::size_t i = 0; i < spectral.clusters(); ++i) {
    clusters.push_back(
        {{"multiplier", complex_json(spectral.eigenvalues[i])},
         {"algebraic", spectral.multiplicities[i]},
         {"geometric", geometric_multiplicity(spectral.matrix, spectral.eigenvalues[i])}});
  }
  body["spectral"] = {{"clusters", clusters},
                      {"ambiguous", spectral.ambiguous},
                      {"projection_residual", projection_residuals(spectral).max()},
                      {"log_monodromy", matrix_json(dec.log_monodromy())}};

  json exponents = json::array();
  stage("floquet.exponents", [&] {
    for (Complex lambda : spectral.eigenvalues) {
      for (long k : cfg.analysis.branches) {
        const FloquetExponent ex = exponent_from_multiplier(lambda, sys, ts, k);
        const Complex check = scalar_exp([&](double x) { return ex.value(ts, x); }, ts, ex.t1, ex.t0);
        exponents.push_back({{"multiplier", complex_json(lambda)},
                             {"branch", k},
                             {"gamma0", complex_json(ex.gamma0)},
                             {"gamma_at_t0", complex_json(ex.value(ts, ex.t0))},
                             {"residual", std::abs(check - lambda)},
                             {"strip_violations", ex.strip_violations},
                             {"continuation", ex.continued}});
      }
    }
  });
  body["exponents"] = exponents;

  const PeriodicSolution ps = stage("floquet.periodic_solution", [&] {
    return homogeneous_periodic_solution(dec, tol.resonance);
  });
  body["periodic_solution"] = {{"exists", ps.exists},
                               {"x0", ps.exists ? vector_json(ps.x0) : json()},
                               {"residual", ps.exists ? json(ps.residual) : json()}};

  if (F) {
    json nonhom;
    try {
      const Vector x0 = stage("floquet.nonhomogeneous", [&] {
        return nonhomogeneous_periodic_state(A, *F, ts, sys, tol.resonance, fopts.transition);
      });
      const Vector back = variation_of_constants(A, *F, ts, dec.t1(), dec.t0(), x0, fopts.transition);
      nonhom = {{"resonant", false},
                {"x0", vector_json(x0)},
                {"return_residual", (back - x0).norm()}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ResonantSystem) throw;
      nonhom = {{"resonant", true}, {"x0", json()}, {"return_residual", json()}};
    }
    body["nonhomogeneous"] = nonhom;
  }

  if (cfg.system.x0) {
    Vector x0(n);
    for (Eigen::Index i = 0; i < n; ++i) x0(i) = (*cfg.system.x0)[static_cast<std::size_t>(i)];
    json traj_t = json::array(), traj_x = json::array();
    for (const SampleRow& row : rep.rows) {
      Vector x = row.phi * x0;
      if (F) x = variation_of_constants(A, *F, ts, row.t, dec.t0(), x0, fopts.transition);
      traj_t.push_back(row.t);
      traj_x.push_back(vector_json(x));
    }
    body["trajectory"] = {{"t", traj_t}, {"x", traj_x}};
  }

  StabilityOptions sopts;
  sopts.horizon = cfg.analysis.horizon.value_or(dec.t0());
  sopts.t_max = t_end;
  sopts.samples = cfg.analysis.samples;
  sopts.eps_tol = tol.eps_tol;
  sopts.epsilon = tol.epsilon;
  const StabilityReport st = stage("stability", [&] { return classify(dec, sopts); });
  json tracks = json::array();
  json re_mu_cols = json::array();
  for (const EigenTrack& tr : st.tracks) {
    json gam = json::array();
    for (Complex g : tr.gamma) gam.push_back(complex_json(g));
    tracks.push_back({{"multiplier", complex_json(tr.multiplier)},
                      {"algebraic", tr.algebraic},
                      {"geometric", tr.geometric},
                      {"infimum", finite(tr.infimum, "infimum statistic")},
                      {"epsilon_stat", finite(tr.epsilon_stat, "epsilon statistic")},
                      {"gamma", gam},
                      {"re_mu", tr.re_mu}});
    re_mu_cols.push_back(tr.re_mu);
  }
  body["stability"] = {{"horizon", st.horizon},
                       {"t_max", st.t_max},
                       {"t", st.samples},
                       {"lambda_ratio", st.lambda_ratio},
                       {"re_mu", re_mu_cols},
                       {"tracks", tracks},
                       {"uniform_regressivity",
                        {{"theta_inv", st.certificate.theta_inv},
                         {"observed_min", st.certificate.observed_min},
                         {"pass", st.certificate.pass}}},
                       {"verdict_theorem", std::string(to_string(st.theorem))},
                       {"verdict_corollary", std::string(to_string(st.corollary))},
                       {"notes", st.notes}};
  rep.body = std::move(body);
  return rep;
}

json AnalysisReport::to_json() const {
  json out;
  out["schema_version"] = std::string(kSchemaVersion);
  out["timescale"] = {{"kind", config.timescale.kind},
                      {"window", {config.timescale.t_min, config.timescale.t_max}}};
  out["shifts"] = {{"kind", config.shifts.kind}, {"T", config.shifts.T}};
  json per;
  for (const auto& section : periodicity) per[section.name] = periodicity_json(section.report);
  per["pass"] = periodicity_pass;
  out["periodicity"] = per;
  if (body) {
    for (const auto& [key, value] : body->items()) out[key] = value;
    out["samples"] = rows.size();
  }
  return out;
}

void write_report(const AnalysisReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << report.to_json().dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string samples_csv(const AnalysisReport& report) {
  std::vector<std::string> header{"t", "sigma", "mu", "theta"};
  const Eigen::Index n = report.rows.empty() ? 0 : report.rows.front().phi.rows();
  for (const char* name : {"phi", "eR", "L"}) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const std::string base = std::string(name) + "_" + std::to_string(i) + "_" + std::to_string(j);
        header.push_back(base + "_re");
        header.push_back(base + "_im");
      }
    }
  }
  for (std::size_t k = 0; k < report.cluster_multipliers.size(); ++k) {
    header.push_back("re_mu_" + std::to_string(k));
  }
  header.push_back("lambda_ratio");

  std::string out;
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += "\r\n";
  };
  emit(header);
  for (const SampleRow& row : report.rows) {
    std::vector<std::string> f{fmt(row.t), fmt(row.sigma), fmt(row.mu), fmt(row.theta)};
    for (const Matrix* m : {&row.phi, &row.e_R, &row.L}) {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          f.push_back(fmt((*m)(i, j).real()));
          f.push_back(fmt((*m)(i, j).imag()));
        }
      }
    }
    for (double r : row.re_mu) f.push_back(fmt(r));
    f.push_back(fmt(row.lambda_ratio));
    emit(f);
  }
  return out;
}

void emit_samples(const AnalysisReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << samples_csv(report);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace tsfloquet
