#include "psr/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <complex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace psr {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what,
                       const YAML::Node& node = YAML::Node()) {
  std::ostringstream os;
  os << "config: " << field << ": " << what;
  if (node.IsDefined() && node.Mark().line >= 0) {
    os << " (line " << node.Mark().line + 1 << ")";
  }
  throw std::invalid_argument(os.str());
}

void require_known_keys(const YAML::Node& map, const std::string& section,
                        const std::set<std::string>& known) {
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!known.count(key)) {
      fail(section.empty() ? key : section + "." + key, "unknown key",
           kv.first);
    }
  }
}

double as_double(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(field, "expected a number", node);
  }
}

int as_int(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<int>();
  } catch (const YAML::Exception&) {
    fail(field, "expected an integer", node);
  }
}

bool as_bool(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    fail(field, "expected a boolean", node);
  }
}

void parse_algo(const YAML::Node& node, AlgoConfig* algo) {
  require_known_keys(node, "algo",
                     {"eta", "n_samples", "conv_tol", "max_outer_iters",
                      "sdp_tol", "seed", "eps_floor", "psd_floor",
                      "paper_covariance"});
  if (node["eta"]) {
    const YAML::Node eta = node["eta"];
    if (eta.IsSequence()) {
      algo->eta = VectorXd(eta.size());
      for (std::size_t i = 0; i < eta.size(); ++i) {
        algo->eta[i] = as_double(eta[i], "algo.eta");
      }
    } else {
      algo->eta = VectorXd::Constant(1, as_double(eta, "algo.eta"));
    }
    for (Eigen::Index i = 0; i < algo->eta.size(); ++i) {
      if (!(algo->eta[i] > 0.0 && algo->eta[i] < 1.0)) {
        fail("algo.eta", "entries must lie in (0, 1)", eta);
      }
    }
  }
  if (node["n_samples"]) {
    algo->n_samples = as_int(node["n_samples"], "algo.n_samples");
    if (algo->n_samples < 1) {
      fail("algo.n_samples", "must be >= 1", node["n_samples"]);
    }
  }
  if (node["conv_tol"]) {
    algo->conv_tol = as_double(node["conv_tol"], "algo.conv_tol");
    if (!(algo->conv_tol > 0.0)) {
      fail("algo.conv_tol", "must be positive", node["conv_tol"]);
    }
  }
  if (node["max_outer_iters"]) {
    algo->max_outer_iters =
        as_int(node["max_outer_iters"], "algo.max_outer_iters");
    if (algo->max_outer_iters < 1) {
      fail("algo.max_outer_iters", "must be >= 1", node["max_outer_iters"]);
    }
  }
  if (node["sdp_tol"]) {
    algo->sdp_tol = as_double(node["sdp_tol"], "algo.sdp_tol");
    if (!(algo->sdp_tol > 0.0 && algo->sdp_tol <= 1e-4)) {
      fail("algo.sdp_tol", "must lie in (0, 1e-4]", node["sdp_tol"]);
    }
  }
  if (node["seed"]) {
    algo->seed = node["seed"].as<unsigned long long>();
  }
  if (node["eps_floor"]) {
    algo->eps_floor = as_double(node["eps_floor"], "algo.eps_floor");
    if (!(algo->eps_floor > 0.0)) {
      fail("algo.eps_floor", "must be positive", node["eps_floor"]);
    }
  }
  if (node["psd_floor"]) {
    algo->psd_floor = as_double(node["psd_floor"], "algo.psd_floor");
    if (algo->psd_floor < 0.0) {
      fail("algo.psd_floor", "must be nonnegative", node["psd_floor"]);
    }
  }
  if (node["paper_covariance"]) {
    algo->paper_covariance =
        as_bool(node["paper_covariance"], "algo.paper_covariance");
  }
}

}  // namespace

ChannelRealization ExperimentConfig::make_channel() const {
  VectorXcd gains(channel.size());
  for (std::size_t k = 0; k < channel.size(); ++k) {
    gains[k] = std::polar(channel[k].first, channel[k].second);
  }
  return ChannelRealization(gains);
}

SystemParams ExperimentConfig::make_params() const {
  SystemParams p;
  p.transmit_power = transmit_power;
  p.antenna_noise_var = antenna_noise_var;
  p.processing_noise_var = processing_noise_var;
  p.conversion_efficiency = tau;
  p.validate();
  return p;
}

std::vector<double> ExperimentConfig::make_psi_grid() const {
  if (!psi_list.empty()) {
    return psi_list;
  }
  const ChannelRealization ch = make_channel();
  const SystemParams p = make_params();
  const double cap = max_rate(ch, p, VectorXd::Ones(ch.size()));
  std::vector<double> grid(psi_points);
  for (int i = 0; i < psi_points; ++i) {
    grid[i] = cap * double(i) / double(psi_points - 1);
  }
  return grid;
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw std::invalid_argument(std::string("config: parse error: ") +
                                e.what());
  }
  if (!root.IsMap()) {
    throw std::invalid_argument("config: document must be a key/value map");
  }
  require_known_keys(root, "",
                     {"channel", "transmit_power", "antenna_noise_var",
                      "processing_noise_var", "tau", "psi_points", "psi_list",
                      "algo", "baselines", "output"});

  ExperimentConfig cfg;
  if (!root["channel"]) {
    fail("channel", "missing");
  }
  const YAML::Node ch = root["channel"];
  if (!ch.IsSequence() || ch.size() == 0) {
    fail("channel", "must be a non-empty list of [magnitude, phase] pairs",
         ch);
  }
  for (std::size_t k = 0; k < ch.size(); ++k) {
    const YAML::Node entry = ch[k];
    if (!entry.IsSequence() || entry.size() != 2) {
      fail("channel[" + std::to_string(k) + "]",
           "expected a [magnitude, phase] pair", entry);
    }
    const double mag = as_double(entry[0], "channel[" + std::to_string(k) + "]");
    const double phase =
        as_double(entry[1], "channel[" + std::to_string(k) + "]");
    if (!(mag >= 0.0) || !std::isfinite(mag) || !std::isfinite(phase)) {
      fail("channel[" + std::to_string(k) + "]",
           "magnitude must be finite and nonnegative", entry);
    }
    cfg.channel.emplace_back(mag, phase);
  }

  if (root["transmit_power"]) {
    cfg.transmit_power = as_double(root["transmit_power"], "transmit_power");
  }
  if (root["antenna_noise_var"]) {
    cfg.antenna_noise_var =
        as_double(root["antenna_noise_var"], "antenna_noise_var");
  }
  if (root["processing_noise_var"]) {
    cfg.processing_noise_var =
        as_double(root["processing_noise_var"], "processing_noise_var");
  }
  if (root["tau"]) {
    cfg.tau = as_double(root["tau"], "tau");
  }
  if (root["psi_points"]) {
    cfg.psi_points = as_int(root["psi_points"], "psi_points");
    if (cfg.psi_points < 2) {
      fail("psi_points", "must be >= 2", root["psi_points"]);
    }
  }
  if (root["psi_list"]) {
    const YAML::Node list = root["psi_list"];
    if (!list.IsSequence()) {
      fail("psi_list", "expected a list of rates", list);
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.psi_list.push_back(as_double(list[i], "psi_list"));
      if (!(cfg.psi_list.back() >= 0.0)) {
        fail("psi_list", "rates must be nonnegative", list[i]);
      }
      if (i > 0 && cfg.psi_list[i] < cfg.psi_list[i - 1]) {
        fail("psi_list", "must be sorted ascending", list[i]);
      }
    }
  }
  if (root["algo"]) {
    if (!root["algo"].IsMap()) {
      fail("algo", "expected a section", root["algo"]);
    }
    parse_algo(root["algo"], &cfg.algo);
  }
  if (root["baselines"]) {
    const YAML::Node b = root["baselines"];
    if (!b.IsMap()) {
      fail("baselines", "expected a section", b);
    }
    require_known_keys(b, "baselines",
                       {"oracle", "oracle_delta", "as", "multichain"});
    if (b["oracle"]) {
      cfg.baselines.oracle = as_bool(b["oracle"], "baselines.oracle");
    }
    if (b["oracle_delta"]) {
      cfg.baselines.oracle_delta =
          as_double(b["oracle_delta"], "baselines.oracle_delta");
      if (!(cfg.baselines.oracle_delta > 0.0 &&
            cfg.baselines.oracle_delta <= 0.5)) {
        fail("baselines.oracle_delta", "must lie in (0, 0.5]",
             b["oracle_delta"]);
      }
    }
    if (b["as"]) {
      cfg.baselines.antenna_switching = as_bool(b["as"], "baselines.as");
    }
    if (b["multichain"]) {
      cfg.baselines.multichain = as_bool(b["multichain"], "baselines.multichain");
    }
  }
  if (root["output"]) {
    const YAML::Node o = root["output"];
    if (!o.IsMap()) {
      fail("output", "expected a section", o);
    }
    require_known_keys(o, "output", {"dir", "format", "plot"});
    if (o["dir"]) {
      cfg.output.dir = o["dir"].as<std::string>();
    }
    if (o["format"]) {
      cfg.output.format = o["format"].as<std::string>();
      if (cfg.output.format != "csv" && cfg.output.format != "json" &&
          cfg.output.format != "both") {
        fail("output.format", "expected csv, json or both", o["format"]);
      }
    }
    if (o["plot"]) {
      cfg.output.plot = o["plot"].as<std::string>();
    }
  }

  // Surface invalid physics immediately with field-level messages.
  try {
    cfg.make_channel();
    cfg.make_params();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.transmit_power = 2.0;
  cfg.antenna_noise_var = 0.1;
  cfg.processing_noise_var = 0.1;
  cfg.tau = 1.0;
  if (name == "h1") {
    cfg.channel = {{0.41, 0.95}, {0.29, 1.44}};
  } else if (name == "h2") {
    cfg.channel = {{0.37, 0.42}, {0.42, 1.4}, {0.16, 0.78}};
  } else if (name == "h3") {
    cfg.channel = {{0.26, 0.12}, {0.29, 2.15}, {0.34, 1.80}, {0.24, 2.08}};
  } else if (name == "h4") {
    cfg.channel = {
        {0.37, 0.79}, {0.33, 0.43}, {0.38, 0.12}, {0.40, 0.85}, {0.39, 1.05}};
  } else {
    throw std::invalid_argument("preset: unknown name '" + name +
                                "' (expected h1, h2, h3 or h4)");
  }
  return cfg;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.channel == b.channel && a.transmit_power == b.transmit_power &&
         a.antenna_noise_var == b.antenna_noise_var &&
         a.processing_noise_var == b.processing_noise_var && a.tau == b.tau &&
         a.psi_points == b.psi_points && a.psi_list == b.psi_list &&
         a.algo.eta.size() == b.algo.eta.size() &&
         (a.algo.eta.array() == b.algo.eta.array()).all() &&
         a.algo.n_samples == b.algo.n_samples &&
         a.algo.conv_tol == b.algo.conv_tol &&
         a.algo.max_outer_iters == b.algo.max_outer_iters &&
         a.algo.sdp_tol == b.algo.sdp_tol && a.algo.seed == b.algo.seed &&
         a.algo.eps_floor == b.algo.eps_floor &&
         a.algo.psd_floor == b.algo.psd_floor &&
         a.algo.paper_covariance == b.algo.paper_covariance &&
         a.baselines.oracle == b.baselines.oracle &&
         a.baselines.oracle_delta == b.baselines.oracle_delta &&
         a.baselines.antenna_switching == b.baselines.antenna_switching &&
         a.baselines.multichain == b.baselines.multichain &&
         a.output.dir == b.output.dir && a.output.format == b.output.format &&
         a.output.plot == b.output.plot;
}

}  // namespace psr
