#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tsfloquet/floquet.hpp"
#include "tsfloquet/stability.hpp"

namespace tsfloquet {

inline constexpr std::string_view kSchemaVersion = "1.0.0";

struct TimescaleConfig {
  std::string kind;
  std::map<std::string, double> params;
  double t_min = 0.0;
  double t_max = 0.0;
  /// Only for kind "explicit".
  std::vector<TimeCell> cells;
};

struct ShiftConfig {
  std::string kind;
  ParamMap params;
  std::optional<double> t0;
  double T = 0.0;
  /// Only for kind "custom": expressions in s and t.
  std::string forward;
  std::string backward;
};

struct SystemConfig {
  int n = 0;
  std::vector<std::vector<std::string>> A;
  std::vector<std::string> F;
  std::optional<std::vector<double>> x0;
  ParamMap params;
};

struct Tolerances {
  double quadrature = 1e-10;
  double ode = 1e-10;
  double eigen = 1e-8;
  double resonance = 1e-8;
  double eps_tol = 1e-9;
  double epsilon = 0.0;
  double periodicity = 1e-10;

  /// Sets one field by name; ConfigError for unknown keys.
  void set(std::string_view key, double value);
};

struct AnalysisSettings {
  std::optional<double> horizon;
  std::optional<double> t_max;
  std::size_t samples = 200;
  std::size_t periodicity_samples = 200;
  std::vector<long> branches{0};
  Tolerances tolerances;
};

struct OutputConfig {
  std::string report_path;
  std::string samples_path;
};

struct AnalysisConfig {
  TimescaleConfig timescale;
  ShiftConfig shifts;
  SystemConfig system;
  AnalysisSettings analysis;
  OutputConfig outputs;

  static AnalysisConfig from_json(const nlohmann::json& doc);
  static AnalysisConfig from_file(const std::filesystem::path& path);
};

TimeScaleWindow build_timescale(const TimescaleConfig& cfg);
ShiftSystem build_shifts(const ShiftConfig& cfg);
MatrixFunction build_matrix(const SystemConfig& cfg);
std::optional<MatrixFunction> build_forcing(const SystemConfig& cfg);

/// One row of the CSV sample table.
struct SampleRow {
  double t = 0.0;
  double sigma = 0.0;
  double mu = 0.0;
  double theta = 0.0;
  Matrix phi;
  Matrix e_R;
  Matrix L;
  std::vector<double> re_mu;
  double lambda_ratio = 0.0;
};

struct PeriodicitySection {
  std::string name;
  PeriodicityReport report;
};

struct AnalysisReport {
  AnalysisConfig config;
  std::vector<PeriodicitySection> periodicity;
  bool periodicity_pass = true;
  /// Everything below is present only when periodicity passed.
  std::optional<nlohmann::json> body;
  std::vector<SampleRow> rows;
  std::vector<Complex> cluster_multipliers;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Periodicity checks only.
AnalysisReport verify_config(const AnalysisConfig& cfg);

/// Full pipeline. Stops after the periodicity stage when it fails.
AnalysisReport run_analysis(const AnalysisConfig& cfg);

void write_report(const AnalysisReport& report, const std::filesystem::path& path);
void emit_samples(const AnalysisReport& report, const std::filesystem::path& path);
std::string samples_csv(const AnalysisReport& report);

/// 0 ok, 1 config, 2 periodicity, 3 numeric.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace tsfloquet
