#include "psr/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace psr {

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

int log_level() {
  const char* env = std::getenv("PSREGION_LOG");
  if (!env) {
    return 1;
  }
  const std::string v = env;
  if (v == "quiet" || v == "0") return 0;
  if (v == "debug" || v == "2") return 2;
  return 1;
}

void log_line(int level, const std::string& msg) {
  if (log_level() >= level) {
    std::fprintf(stderr, "%s\n", msg.c_str());
  }
}

}  // namespace

std::string to_csv(const RegionReport& report) {
  std::string out =
      "method,psi,rate_exact,rate_constraint,energy_watts,iters,converged\n";
  for (const ReportRow& row : report.rows) {
    out += row.method;
    out += ',';
    out += fmt9(row.point.psi);
    out += ',';
    out += fmt9(row.point.rate_exact);
    out += ',';
    out += fmt9(row.point.rate_constraint);
    out += ',';
    out += fmt9(row.point.energy);
    out += ',';
    out += std::to_string(row.point.outer_iters);
    out += ',';
    out += row.point.converged ? '1' : '0';
    out += '\n';
  }
  return out;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  nlohmann::json ch = nlohmann::json::array();
  for (const auto& [mag, phase] : cfg.channel) {
    ch.push_back({mag, phase});
  }
  j["channel"] = ch;
  j["transmit_power"] = cfg.transmit_power;
  j["antenna_noise_var"] = cfg.antenna_noise_var;
  j["processing_noise_var"] = cfg.processing_noise_var;
  j["tau"] = cfg.tau;
  j["psi_points"] = cfg.psi_points;
  if (!cfg.psi_list.empty()) {
    j["psi_list"] = cfg.psi_list;
  }
  nlohmann::json algo;
  if (cfg.algo.eta.size() > 0) {
    algo["eta"] = std::vector<double>(cfg.algo.eta.begin(), cfg.algo.eta.end());
  }
  algo["n_samples"] = cfg.algo.n_samples;
  algo["conv_tol"] = cfg.algo.conv_tol;
  algo["max_outer_iters"] = cfg.algo.max_outer_iters;
  algo["sdp_tol"] = cfg.algo.sdp_tol;
  algo["seed"] = cfg.algo.seed;
  algo["eps_floor"] = cfg.algo.eps_floor;
  algo["psd_floor"] = cfg.algo.psd_floor;
  algo["paper_covariance"] = cfg.algo.paper_covariance;
  j["algo"] = algo;
  j["baselines"] = {{"oracle", cfg.baselines.oracle},
                    {"oracle_delta", cfg.baselines.oracle_delta},
                    {"as", cfg.baselines.antenna_switching},
                    {"multichain", cfg.baselines.multichain}};
  j["output"] = {{"dir", cfg.output.dir},
                 {"format", cfg.output.format},
                 {"plot", cfg.output.plot}};
  return j;
}

nlohmann::json to_json(const RegionReport& report) {
  nlohmann::json j;
  j["metadata"] = {{"tool_version", report.tool_version},
                   {"seed", report.seed},
                   {"config", config_to_json(report.config)}};
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& row : report.rows) {
    nlohmann::json r;
    r["method"] = row.method;
    r["psi"] = row.point.psi;
    r["rate_exact"] = row.point.rate_exact;
    r["rate_constraint"] = row.point.rate_constraint;
    r["energy_watts"] = row.point.energy;
    r["lambda"] =
        std::vector<double>(row.point.lambda.begin(), row.point.lambda.end());
    r["iters"] = row.point.outer_iters;
    r["converged"] = row.point.converged;
    rows.push_back(std::move(r));
  }
  j["rows"] = rows;
  return j;
}

RegionReport report_from_json(const nlohmann::json& j) {
  RegionReport report;
  const nlohmann::json& meta = j.at("metadata");
  report.tool_version = meta.at("tool_version").get<std::string>();
  report.seed = meta.at("seed").get<std::uint64_t>();
  report.config = parse_config(meta.at("config").dump());
  // parse_config cannot see non-defaults that JSON omits when equal to the
  // YAML defaults; config_to_json always writes every field, so nothing is
  // lost in practice.
  for (const nlohmann::json& r : j.at("rows")) {
    ReportRow row;
    row.method = r.at("method").get<std::string>();
    row.point.psi = r.at("psi").get<double>();
    row.point.rate_exact = r.at("rate_exact").get<double>();
    row.point.rate_constraint = r.at("rate_constraint").get<double>();
    row.point.energy = r.at("energy_watts").get<double>();
    const auto lambda = r.at("lambda").get<std::vector<double>>();
    row.point.lambda =
        Eigen::Map<const VectorXd>(lambda.data(), lambda.size());
    row.point.outer_iters = r.at("iters").get<int>();
    row.point.converged = r.at("converged").get<bool>();
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

struct Series {
  std::string method;
  std::string color;
  bool markers;
  std::vector<std::pair<double, double>> pts;  // (rate axis, energy axis)
};

}  // namespace

std::string to_svg(const RegionReport& report) {
  const int width = 640, height = 480;
  const int ml = 70, mr = 20, mt = 20, mb = 50;

  const struct {
    const char* method;
    const char* color;
    bool markers;
  } palette[] = {
      {"ps", "#1f77b4", false},
      {"oracle", "#2ca02c", false},
      {"multichain", "#9467bd", false},
      {"as_hull", "#d62728", false},
      {"as_point", "#d62728", true},
  };

  std::vector<Series> series;
  double max_x = 0.0, max_y = 0.0;
  for (const auto& entry : palette) {
    Series s;
    s.method = entry.method;
    s.color = entry.color;
    s.markers = entry.markers;
    for (const ReportRow& row : report.rows) {
      if (row.method == entry.method) {
        const double x = row.point.psi;
        const double y = row.point.energy;
        s.pts.emplace_back(x, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
      }
    }
    if (!s.pts.empty()) {
      series.push_back(std::move(s));
    }
  }
  if (max_x <= 0.0) max_x = 1.0;
  if (max_y <= 0.0) max_y = 1.0;

  auto sx = [&](double x) { return ml + x / max_x * (width - ml - mr); };
  auto sy = [&](double y) { return height - mb - y / max_y * (height - mt - mb); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
     << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
     << width - mr << "\" y2=\"" << height - mb
     << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << ml
     << "\" y2=\"" << mt << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = max_x * t / 5.0;
    const double yv = max_y * t / 5.0;
    os << "<line x1=\"" << sx(xv) << "\" y1=\"" << height - mb << "\" x2=\""
       << sx(xv) << "\" y2=\"" << height - mb + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << sx(xv) << "\" y=\"" << height - mb + 20
       << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt9(xv)
       << "</text>\n";
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << ml
       << "\" y2=\"" << sy(yv) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << sy(yv) + 4
       << "\" font-size=\"11\" text-anchor=\"end\">" << fmt9(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
     << "\" font-size=\"13\" text-anchor=\"middle\">rate (bits)</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
     << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (mt + height - mb) / 2 << ")\">energy (W)</text>\n";

  int legend_y = mt + 10;
  for (const Series& s : series) {
    if (s.markers) {
      for (const auto& [x, y] : s.pts) {
        os << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
           << "\" r=\"3\" fill=\"none\" stroke=\"" << s.color << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << s.color
         << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : s.pts) {
        os << sx(x) << "," << sy(y) << " ";
      }
      os << "\"/>\n";
    }
    os << "<text x=\"" << width - mr - 110 << "\" y=\"" << legend_y
       << "\" font-size=\"12\" fill=\"" << s.color << "\">" << s.method
       << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";
  return os.str();
}

Command command_from_string(const std::string& name) {
  if (name == "region") return Command::kRegion;
  if (name == "solve") return Command::kSolve;
  if (name == "oracle") return Command::kOracle;
  if (name == "as-baseline") return Command::kAsBaseline;
  if (name == "multichain") return Command::kMultichain;
  if (name == "compare") return Command::kCompare;
  throw std::invalid_argument("unknown command: " + name);
}

RegionReport run_experiment(Command cmd, const ExperimentConfig& cfg,
                            std::optional<double> psi_override) {
  const ChannelRealization ch = cfg.make_channel();
  const SystemParams p = cfg.make_params();
  const std::vector<double> grid = cfg.make_psi_grid();

  RegionReport report;
  report.seed = cfg.algo.seed;
  report.config = cfg;

  auto add_points = [&](const std::string& method,
                        const std::vector<RegionPoint>& pts) {
    for (const RegionPoint& pt : pts) {
      report.rows.push_back({method, pt});
    }
  };

  const bool want_ps = cmd == Command::kRegion || cmd == Command::kSolve ||
                       cmd == Command::kCompare;
  const bool want_oracle = cmd == Command::kOracle ||
                           (cmd == Command::kCompare && cfg.baselines.oracle);
  const bool want_as =
      cmd == Command::kAsBaseline ||
      (cmd == Command::kCompare && cfg.baselines.antenna_switching);
  const bool want_multichain =
      cmd == Command::kMultichain ||
      (cmd == Command::kCompare && cfg.baselines.multichain);

  if (want_ps) {
    if (cmd == Command::kSolve) {
      if (!psi_override) {
        throw std::invalid_argument("solve: --psi is required");
      }
      IterTrace trace;
      add_points("ps", {solve_single(ch, p, *psi_override, cfg.algo, &trace)});
      log_line(2, "solve: " + std::to_string(trace.size()) + " outer iterations");
    } else {
      add_points("ps", sweep_region(ch, p, grid, cfg.algo));
    }
    log_line(1, "ps rows done");
  }
  if (want_oracle) {
    add_points("oracle", oracle_region(ch, p, grid, cfg.baselines.oracle_delta,
                                       /*use_exact_rate=*/false));
    log_line(1, "oracle rows done");
  }
  if (want_multichain) {
    add_points("multichain",
               multichain_region(ch, p, grid, cfg.baselines.oracle_delta,
                                 /*use_exact_rate=*/false));
    log_line(1, "multichain rows done");
  }
  if (want_as) {
    const AsRegion as = as_region(ch, p);
    std::vector<RegionPoint> pts;
    for (const AsPoint& ap : as.points) {
      RegionPoint pt;
      pt.psi = ap.rate;
      pt.rate_exact = ap.rate;
      pt.energy = ap.energy;
      VectorXd lambda = VectorXd::Zero(ch.size());
      for (int k = 0; k < ch.size(); ++k) {
        lambda[k] = (ap.mask >> k) & 1u ? 1.0 : 0.0;
      }
      pt.lambda = lambda;
      pt.rate_constraint = constraint_rate(ch, p, lambda);
      pt.converged = true;
      pts.push_back(std::move(pt));
    }
    add_points("as_point", pts);
    std::vector<RegionPoint> hull;
    for (std::size_t idx : as.hull) {
      hull.push_back(pts[idx]);
    }
    add_points("as_hull", hull);
    log_line(1, "as rows done");
  }
  return report;
}

std::vector<std::string> write_outputs(const RegionReport& report,
                                       Command cmd) {
  namespace fs = std::filesystem;
  const OutputOptions& out = report.config.output;
  std::vector<std::string> written;
  fs::create_directories(out.dir);

  const bool csv = out.format == "csv" || out.format == "both";
  const bool json = out.format == "json" || out.format == "both";
  if (csv) {
    const fs::path path = fs::path(out.dir) / "report.csv";
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      throw std::runtime_error("cannot write " + path.string());
    }
    f << to_csv(report);
    written.push_back(path.string());
  }
  if (json) {
    const fs::path path = fs::path(out.dir) / "report.json";
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      throw std::runtime_error("cannot write " + path.string());
    }
    f << to_json(report).dump(2) << "\n";
    written.push_back(path.string());
  }
  std::string plot = report.config.output.plot;
  if (plot.empty() && cmd == Command::kCompare) {
    plot = "region.svg";
  }
  if (!plot.empty()) {
    fs::path path(plot);
    if (path.is_relative()) {
      path = fs::path(out.dir) / path;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      throw std::runtime_error("cannot write " + path.string());
    }
    f << to_svg(report);
    written.push_back(path.string());
  }
  for (const std::string& path : written) {
    log_line(1, "wrote " + path);
  }
  return written;
}

}  // namespace psr
