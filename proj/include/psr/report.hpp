#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psr/config.hpp"

namespace psr {

inline constexpr const char* kToolVersion = "psregion 0.1.0";

struct ReportRow {
  std::string method;  // ps | oracle | multichain | as_point | as_hull
  RegionPoint point;
};

struct RegionReport {
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  ExperimentConfig config;
  std::vector<ReportRow> rows;
};

// Columns: method,psi,rate_exact,rate_constraint,energy_watts,iters,converged.
// UTF-8, LF endings, '.' decimal separator, 9 significant digits.
std::string to_csv(const RegionReport& report);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const RegionReport& report);
// Inverse of to_json; the embedded config echo is re-parsed through the
// regular config path, so a report reproduces its run.
RegionReport report_from_json(const nlohmann::json& j);

// Self-contained frontier overlay (inline axes, no external assets).
std::string to_svg(const RegionReport& report);

enum class Command {
  kRegion,
  kSolve,
  kOracle,
  kAsBaseline,
  kMultichain,
  kCompare,
};

Command command_from_string(const std::string& name);

// Runs the computations a command asks for and assembles the report.
RegionReport run_experiment(Command cmd, const ExperimentConfig& cfg,
                            std::optional<double> psi_override = std::nullopt);

// Emits report files per cfg.output; returns the paths written.
std::vector<std::string> write_outputs(const RegionReport& report,
                                       Command cmd);

}  // namespace psr
