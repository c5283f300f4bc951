#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "psr/report.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::optional<double> psi;
  std::optional<int> psi_points;
  std::optional<unsigned long long> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<std::string> plot;
  std::optional<double> oracle_delta;
};

void add_common(CLI::App* cmd, CommonOpts* opts, bool with_psi) {
  cmd->add_option("--config", opts->config_path, "config file (YAML or JSON)");
  cmd->add_option("--preset", opts->preset, "bundled channel: h1, h2, h3, h4");
  if (with_psi) {
    cmd->add_option("--psi", opts->psi, "rate demand in bits");
  }
  cmd->add_option("--psi-points", opts->psi_points,
                  "number of demand levels on [0, max rate]");
  cmd->add_option("--seed", opts->seed, "RNG seed");
  cmd->add_option("--out", opts->out_dir, "output directory");
  cmd->add_option("--format", opts->format, "csv, json or both");
  cmd->add_option("--plot", opts->plot, "SVG output path");
  cmd->add_option("--oracle-delta", opts->oracle_delta,
                  "grid spacing for the exhaustive baselines");
}

psr::ExperimentConfig load_config(const CommonOpts& opts) {
  if (!opts.config_path.empty() && !opts.preset.empty()) {
    throw std::invalid_argument("pass either --config or --preset, not both");
  }
  psr::ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    std::ifstream f(opts.config_path);
    if (!f) {
      throw std::runtime_error("cannot read " + opts.config_path);
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    cfg = psr::parse_config(buf.str());
  } else if (!opts.preset.empty()) {
    cfg = psr::preset_config(opts.preset);
  } else {
    throw std::invalid_argument("a --config file or --preset is required");
  }
  if (opts.psi_points) {
    if (*opts.psi_points < 2) {
      throw std::invalid_argument("--psi-points must be >= 2");
    }
    cfg.psi_points = *opts.psi_points;
    cfg.psi_list.clear();
  }
  if (opts.seed) {
    cfg.algo.seed = *opts.seed;
  }
  if (opts.out_dir) {
    cfg.output.dir = *opts.out_dir;
  }
  if (opts.format) {
    if (*opts.format != "csv" && *opts.format != "json" &&
        *opts.format != "both") {
      throw std::invalid_argument("--format expects csv, json or both");
    }
    cfg.output.format = *opts.format;
  }
  if (opts.plot) {
    cfg.output.plot = *opts.plot;
  }
  if (opts.oracle_delta) {
    if (!(*opts.oracle_delta > 0.0 && *opts.oracle_delta <= 0.5)) {
      throw std::invalid_argument("--oracle-delta must lie in (0, 0.5]");
    }
    cfg.baselines.oracle_delta = *opts.oracle_delta;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-energy region of a multi-antenna power-splitting receiver"};
  app.require_subcommand(1);

  const struct {
    const char* name;
    const char* help;
    bool with_psi;
  } commands[] = {
      {"region", "trace the power-splitting frontier", false},
      {"solve", "solve a single rate demand (--psi)", true},
      {"oracle", "exhaustive-search frontier", false},
      {"as-baseline", "antenna-switching points and time-sharing hull", false},
      {"multichain", "per-antenna rectifier bank frontier", false},
      {"compare", "all methods, one merged report and plot", false},
  };

  CommonOpts opts;
  for (const auto& c : commands) {
    add_common(app.add_subcommand(c.name, c.help), &opts, c.with_psi);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const psr::Command cmd = psr::command_from_string(name);
    const psr::ExperimentConfig cfg = load_config(opts);
    const psr::RegionReport report = psr::run_experiment(cmd, cfg, opts.psi);
    psr::write_outputs(report, cmd);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
