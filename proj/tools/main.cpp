#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tsfloquet/analysis.hpp"

namespace {

void apply_overrides(tsfloquet::AnalysisConfig& cfg, const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw tsfloquet::Error(tsfloquet::ErrorCode::ConfigError,
                             "--tol expects key=value, got \"" + item + "\"");
    }
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw tsfloquet::Error(tsfloquet::ErrorCode::ConfigError, "bad number in --tol " + item);
    }
    cfg.analysis.tolerances.set(item.substr(0, eq), value);
  }
}

void print_violations(const tsfloquet::AnalysisReport& rep) {
  for (const auto& section : rep.periodicity) {
    if (section.report.pass) continue;
    std::cerr << "periodicity check \"" << section.name << "\" failed with "
              << section.report.violations.size() << " violation(s)\n";
    for (std::size_t i = 0; i < section.report.violations.size() && i < 5; ++i) {
      const auto& v = section.report.violations[i];
      std::cerr << "  " << v.check << " at s=" << v.s << " t=" << v.t
                << " residual=" << v.residual << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet analysis of periodic linear dynamic systems on time scales", "tsfloquet"};
  app.set_version_flag("--version", std::string(tsfloquet::kSchemaVersion));
  app.require_subcommand(1);

  std::string config_path, report_path, samples_path;
  std::vector<std::string> overrides;

  auto* analyze = app.add_subcommand("analyze", "Run the full analysis pipeline");
  analyze->add_option("--config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);
  analyze->add_option("--report", report_path, "Report JSON output (default: stdout)");
  analyze->add_option("--samples", samples_path, "CSV sample table output");
  analyze->add_option("--tol", overrides, "Tolerance override key=value")->take_all();

  auto* verify = app.add_subcommand("verify", "Only check periodicity in shifts");
  verify->add_option("--config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);
  verify->add_option("--tol", overrides, "Tolerance override key=value")->take_all();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto cfg = tsfloquet::AnalysisConfig::from_file(config_path);
    apply_overrides(cfg, overrides);
    if (verify->parsed()) {
      const auto rep = tsfloquet::verify_config(cfg);
      std::cout << rep.to_json().dump(2) << '\n';
      if (!rep.periodicity_pass) {
        print_violations(rep);
        return 2;
      }
      return 0;
    }
    if (report_path.empty()) report_path = cfg.outputs.report_path;
    if (samples_path.empty()) samples_path = cfg.outputs.samples_path;
    const auto rep = tsfloquet::run_analysis(cfg);
    if (report_path.empty()) {
      std::cout << rep.to_json().dump(2) << '\n';
    } else {
      tsfloquet::write_report(rep, report_path);
    }
    if (!rep.periodicity_pass) {
      print_violations(rep);
      return 2;
    }
    if (!samples_path.empty()) tsfloquet::emit_samples(rep, samples_path);
    return 0;
  } catch (const tsfloquet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tsfloquet::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
