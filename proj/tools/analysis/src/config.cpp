#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tsfloquet/analysis.hpp"

namespace tsfloquet {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) config_error("unknown key \"" + key + "\" in " + where);
  }
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) config_error(where + " must be a number");
  return v.get<double>();
}

std::string expr_text(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  config_error(where + " must be an expression string or a number");
}

template <class Map>
Map number_map(const json& obj, const std::string& where) {
  Map out;
  if (obj.is_null()) return out;
  if (!obj.is_object()) config_error(where + " must be an object of numbers");
  for (const auto& [key, value] : obj.items()) out[key] = number(value, where + "." + key);
  return out;
}

std::pair<double, double> window_of(const json& ts) {
  if (!ts.contains("window")) config_error("timescale.window is required for this kind");
  const json& w = ts.at("window");
  if (!w.is_array() || w.size() != 2) config_error("timescale.window must be [t_min, t_max]");
  return {number(w[0], "timescale.window[0]"), number(w[1], "timescale.window[1]")};
}

TimescaleConfig parse_timescale(const json& j) {
  reject_unknown(j, "timescale", {"kind", "params", "window", "cells"});
  TimescaleConfig c;
  if (!j.contains("kind") || !j.at("kind").is_string()) config_error("timescale.kind is required");
  c.kind = j.at("kind").get<std::string>();
  c.params = number_map<std::map<std::string, double>>(j.value("params", json()), "timescale.params");
  if (c.kind == "explicit") {
    if (!j.contains("cells") || !j.at("cells").is_array()) config_error("timescale.cells is required");
    for (const json& cell : j.at("cells")) {
      if (cell.is_number()) {
        const double p = cell.get<double>();
        c.cells.push_back({p, p});
      } else if (cell.is_array() && cell.size() == 2) {
        c.cells.push_back({number(cell[0], "cell"), number(cell[1], "cell")});
      } else {
        config_error("each timescale cell must be a number or [lo, hi]");
      }
    }
    c.t_min = c.cells.empty() ? 0.0 : c.cells.front().lo;
    c.t_max = c.cells.empty() ? 0.0 : c.cells.back().hi;
  } else if (c.kind == "logistic") {
    if (j.contains("window")) std::tie(c.t_min, c.t_max) = window_of(j);
  } else {
    std::tie(c.t_min, c.t_max) = window_of(j);
  }
  return c;
}

ShiftConfig parse_shifts(const json& j) {
  reject_unknown(j, "shifts", {"kind", "params", "t0", "T", "forward", "backward"});
  ShiftConfig c;
  if (!j.contains("kind") || !j.at("kind").is_string()) config_error("shifts.kind is required");
  c.kind = j.at("kind").get<std::string>();
  c.params = number_map<ParamMap>(j.value("params", json()), "shifts.params");
  if (j.contains("t0")) c.t0 = number(j.at("t0"), "shifts.t0");
  if (!j.contains("T")) config_error("shifts.T is required");
  c.T = number(j.at("T"), "shifts.T");
  if (c.kind == "custom") {
    if (!j.contains("forward") || !j.contains("backward")) {
      config_error("custom shifts need forward and backward expressions");
    }
    c.forward = expr_text(j.at("forward"), "shifts.forward");
    c.backward = expr_text(j.at("backward"), "shifts.backward");
  }
  return c;
}

SystemConfig parse_system(const json& j) {
  reject_unknown(j, "system", {"n", "A", "F", "x0", "params"});
  SystemConfig c;
  if (!j.contains("A") || !j.at("A").is_array()) config_error("system.A is required");
  for (const json& row : j.at("A")) {
    if (!row.is_array()) config_error("system.A must be an array of rows");
    std::vector<std::string> entries;
    for (const json& e : row) entries.push_back(expr_text(e, "system.A entry"));
    c.A.push_back(std::move(entries));
  }
  c.n = static_cast<int>(c.A.size());
  if (j.contains("n") && static_cast<int>(number(j.at("n"), "system.n")) != c.n) {
    config_error("system.n does not match the number of rows of A");
  }
  if (c.n == 0) config_error("system.A is empty");
  for (const auto& row : c.A) {
    if (static_cast<int>(row.size()) != c.n) config_error("system.A must be square");
  }
  if (j.contains("F") && !j.at("F").is_null()) {
    if (!j.at("F").is_array()) config_error("system.F must be an array");
    for (const json& e : j.at("F")) c.F.push_back(expr_text(e, "system.F entry"));
    if (static_cast<int>(c.F.size()) != c.n) config_error("system.F length must equal n");
  }
  if (j.contains("x0") && !j.at("x0").is_null()) {
    std::vector<double> x0;
    for (const json& e : j.at("x0")) x0.push_back(number(e, "system.x0 entry"));
    if (static_cast<int>(x0.size()) != c.n) config_error("system.x0 length must equal n");
    c.x0 = std::move(x0);
  }
  c.params = number_map<ParamMap>(j.value("params", json()), "system.params");
  return c;
}

AnalysisSettings parse_analysis(const json& j) {
  AnalysisSettings c;
  if (j.is_null()) return c;
  reject_unknown(j, "analysis",
                 {"horizon", "t_max", "samples", "periodicity_samples", "branches", "tolerances"});
  if (j.contains("horizon")) c.horizon = number(j.at("horizon"), "analysis.horizon");
  if (j.contains("t_max")) c.t_max = number(j.at("t_max"), "analysis.t_max");
  auto count = [&](const char* key, std::size_t& out) {
    if (!j.contains(key)) return;
    const double v = number(j.at(key), std::string("analysis.") + key);
    if (v < 1 || v != std::floor(v)) config_error(std::string("analysis.") + key + " must be a positive integer");
    out = static_cast<std::size_t>(v);
  };
  count("samples", c.samples);
  count("periodicity_samples", c.periodicity_samples);
  if (j.contains("branches")) {
    c.branches.clear();
    for (const json& b : j.at("branches")) {
      if (!b.is_number_integer()) config_error("analysis.branches must hold integers");
      c.branches.push_back(b.get<long>());
    }
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) config_error("analysis.tolerances must be an object");
    for (const auto& [key, value] : t.items()) {
      c.tolerances.set(key, number(value, "analysis.tolerances." + key));
    }
  }
  return c;
}

OutputConfig parse_outputs(const json& j) {
  OutputConfig c;
  if (j.is_null()) return c;
  reject_unknown(j, "outputs", {"report_path", "samples_path"});
  if (j.contains("report_path")) c.report_path = j.at("report_path").get<std::string>();
  if (j.contains("samples_path")) c.samples_path = j.at("samples_path").get<std::string>();
  return c;
}

ParamMap expression_params(const SystemConfig& cfg) { return cfg.params; }

void check_bound(const Expr& e, const ParamMap& params, const std::string& where) {
  for (const std::string& v : e.variables()) {
    if (v != "t" && !params.contains(v)) {
      throw Error(ErrorCode::UnboundVariable, "variable \"" + v + "\" in " + where + " has no value");
    }
  }
}

}  // namespace

void Tolerances::set(std::string_view key, double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    config_error("tolerance " + std::string(key) + " must be a finite nonnegative number");
  }
  if (key == "quadrature") quadrature = value;
  else if (key == "ode") ode = value;
  else if (key == "eigen") eigen = value;
  else if (key == "resonance") resonance = value;
  else if (key == "eps_tol") eps_tol = value;
  else if (key == "epsilon") epsilon = value;
  else if (key == "periodicity") periodicity = value;
  else config_error("unknown tolerance \"" + std::string(key) + "\"");
}

AnalysisConfig AnalysisConfig::from_json(const json& doc) {
  try {
    reject_unknown(doc, "config", {"timescale", "shifts", "system", "analysis", "outputs"});
    for (const char* key : {"timescale", "shifts", "system"}) {
      if (!doc.contains(key)) config_error(std::string("missing required block \"") + key + "\"");
    }
    AnalysisConfig cfg;
    cfg.timescale = parse_timescale(doc.at("timescale"));
    cfg.shifts = parse_shifts(doc.at("shifts"));
    cfg.system = parse_system(doc.at("system"));
    cfg.analysis = parse_analysis(doc.value("analysis", json()));
    cfg.outputs = parse_outputs(doc.value("outputs", json()));
    return cfg;
  } catch (const json::exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
}

AnalysisConfig AnalysisConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    config_error(path.string() + ": " + e.what());
  }
  return from_json(doc);
}

TimeScaleWindow build_timescale(const TimescaleConfig& cfg) {
  auto param = [&](const char* name) {
    auto it = cfg.params.find(name);
    if (it == cfg.params.end()) config_error(std::string("timescale.params.") + name + " is required");
    return it->second;
  };
  if (cfg.kind == "real") return TimeScaleWindow::real(cfg.t_min, cfg.t_max);
  if (cfg.kind == "integer") return TimeScaleWindow::integer(cfg.t_min, cfg.t_max);
  if (cfg.kind == "q_scale") return TimeScaleWindow::q_scale(param("q"), cfg.t_min, cfg.t_max);
  if (cfg.kind == "geometric_union") {
    return TimeScaleWindow::geometric_union(param("q"), param("c"), cfg.t_min, cfg.t_max);
  }
  if (cfg.kind == "sqrt_naturals") return TimeScaleWindow::sqrt_naturals(cfg.t_min, cfg.t_max);
  if (cfg.kind == "signed_squares") return TimeScaleWindow::signed_squares(cfg.t_min, cfg.t_max);
  if (cfg.kind == "logistic") {
    return TimeScaleWindow::logistic(param("q"), static_cast<int>(param("n_min")),
                                     static_cast<int>(param("n_max")));
  }
  if (cfg.kind == "explicit") return TimeScaleWindow(cfg.cells, "explicit", cfg.params);
  config_error("unknown timescale kind \"" + cfg.kind + "\"");
}

ShiftSystem build_shifts(const ShiftConfig& cfg) {
  auto checked = [&](ShiftSystem sys) {
    if (cfg.t0 && std::abs(*cfg.t0 - sys.t0()) > snap_at(sys.t0())) {
      config_error("shifts.t0 must be " + std::to_string(sys.t0()) + " for kind " + cfg.kind);
    }
    return sys;
  };
  if (cfg.kind == "additive") return checked(ShiftSystem::additive(cfg.T));
  if (cfg.kind == "multiplicative") return checked(ShiftSystem::multiplicative(cfg.T));
  if (cfg.kind == "sqrt") return checked(ShiftSystem::sqrt_shift(cfg.T));
  if (cfg.kind == "signed_squares") return checked(ShiftSystem::signed_squares(cfg.T));
  if (cfg.kind == "logistic") return checked(ShiftSystem::logistic(cfg.T));
  if (cfg.kind == "custom") {
    if (!cfg.t0) config_error("custom shifts need t0");
    const Expr fwd = Expr::parse(cfg.forward);
    const Expr bwd = Expr::parse(cfg.backward);
    ParamMap bound = cfg.params;
    bound["s"] = 0.0;
    check_bound(fwd, bound, "shifts.forward");
    check_bound(bwd, bound, "shifts.backward");
    return ShiftSystem::custom(*cfg.t0, cfg.T, fwd, bwd, cfg.params);
  }
  config_error("unknown shift kind \"" + cfg.kind + "\"");
}

MatrixFunction build_matrix(const SystemConfig& cfg) {
  const ParamMap params = expression_params(cfg);
  std::vector<std::vector<Expr>> entries;
  for (std::size_t i = 0; i < cfg.A.size(); ++i) {
    std::vector<Expr> row;
    for (std::size_t j = 0; j < cfg.A[i].size(); ++j) {
      Expr e = Expr::parse(cfg.A[i][j]);
      check_bound(e, params, "A[" + std::to_string(i) + "][" + std::to_string(j) + "]");
      row.push_back(std::move(e));
    }
    entries.push_back(std::move(row));
  }
  return MatrixFunction::from_exprs(entries, params);
}

std::optional<MatrixFunction> build_forcing(const SystemConfig& cfg) {
  if (cfg.F.empty()) return std::nullopt;
  const ParamMap params = expression_params(cfg);
  std::vector<Expr> entries;
  for (std::size_t i = 0; i < cfg.F.size(); ++i) {
    Expr e = Expr::parse(cfg.F[i]);
    check_bound(e, params, "F[" + std::to_string(i) + "]");
    entries.push_back(std::move(e));
  }
  return MatrixFunction::column_from_exprs(entries, params);
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownFunction:
    case ErrorCode::UnboundVariable:
    case ErrorCode::IoError:
      return 1;
    default:
      return 3;
  }
}

}  // namespace tsfloquet
