#pragma once

#include <string>
#include <utility>
#include <vector>

#include "psr/algorithm.hpp"

namespace psr {

struct BaselineFlags {
  bool oracle = true;
  double oracle_delta = 0.01;
  bool antenna_switching = true;
  bool multichain = true;
};

struct OutputOptions {
  std::string dir = ".";
  std::string format = "csv";  // csv | json | both
  std::string plot;            // SVG path, empty disables the plot
};

struct ExperimentConfig {
  // (magnitude, phase radians) per antenna.
  std::vector<std::pair<double, double>> channel;
  double transmit_power = 2.0;
  double antenna_noise_var = 0.1;
  double processing_noise_var = 0.1;
  double tau = 1.0;
  int psi_points = 21;
  std::vector<double> psi_list;  // non-empty overrides psi_points
  AlgoConfig algo;
  BaselineFlags baselines;
  OutputOptions output;

  ChannelRealization make_channel() const;
  SystemParams make_params() const;
  // Demand grid: psi_list if given, else psi_points evenly spaced values
  // covering [0, max_rate(1)].
  std::vector<double> make_psi_grid() const;
};

// Parses and validates a YAML (or JSON) config document. Unknown keys are
// rejected; messages name the offending field and, where available, the line.
ExperimentConfig parse_config(const std::string& text);

// Channels from the reference measurement set; "h1".."h4" give K = 2..5.
ExperimentConfig preset_config(const std::string& name);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace psr
