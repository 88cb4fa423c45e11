// iscc: solve, sweep and validate split edge-inference resource allocations.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iscc/config.hpp"
#include "iscc/netmodel.hpp"
#include "iscc/optimizer.hpp"
#include "iscc/oracles.hpp"
#include "iscc/report.hpp"
#include "iscc/sensing.hpp"

namespace {

using nlohmann::json;
using namespace iscc;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInfeasible = 2;
constexpr int kConfigError = 3;

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
};

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? default_config() : load_config(c.config);
  if (c.seed_set) cfg.seed = c.seed;
  if (!c.out.empty()) {
    cfg.output.csv = c.out + ".csv";
    cfg.output.json = c.out + ".json";
  }
  return cfg;
}

void emit(const RunConfig& cfg, const std::string& csv, const json& body) {
  if (cfg.output.csv.empty()) {
    std::cout << csv;
  } else {
    write_text(cfg.output.csv, csv);
  }
  if (!cfg.output.json.empty()) {
    json j = body;
    j["config"] = to_json(cfg);
    write_text(cfg.output.json, j.dump(2) + "\n");
  }
}

void report_infeasible(const Solution& s) {
  std::cerr << "infeasible: " << s.reason << "\n";
  for (const auto& p : s.pair_reasons) std::cerr << "  l=" << p.split << " Q=" << p.bits << ": " << p.reason << "\n";
}

int run_solve(const Common& c) {
  const RunConfig cfg = resolve(c);
  const NetworkModel net = build_network(cfg.network);
  const Solution s = solve_scenario(net, cfg.scenario, cfg.accuracy, cfg.solver);
  json body = {{"solution", to_json(s)}};
  if (s.feasible) {
    const auto check = check_feasible(s.alloc, net, cfg.scenario, penalty_terms(net, s.alloc.split, cfg.accuracy),
                                      cfg.accuracy);
    body["constraints"] = to_json(check);
  }
  emit(cfg, csv_header() + "\n" + csv_row(0, s) + "\n", body);
  if (!s.feasible) {
    report_infeasible(s);
    return kInfeasible;
  }
  return kOk;
}

int run_baseline(const Common& c, const std::string& kind) {
  const RunConfig cfg = resolve(c);
  const Origin origin = origin_from_string(kind);
  const NetworkModel net = build_network(cfg.network);
  const Solution s = solve_baseline(origin, net, cfg.scenario, cfg.accuracy, cfg.solver);
  emit(cfg, csv_header() + "\n" + csv_row(0, s) + "\n", {{"solution", to_json(s)}});
  if (!s.feasible) {
    report_infeasible(s);
    return kInfeasible;
  }
  return kOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--values: '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw ConfigError("--values: empty list");
  return values;
}

int run_sweep(const Common& c, const std::string& axis_name, const std::string& values_text) {
  const RunConfig cfg = resolve(c);
  SweepAxis axis;
  try {
    axis = sweep_axis_from_string(axis_name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto values = parse_values(values_text);
  const NetworkModel net = build_network(cfg.network);
  const auto rows = sweep(net, cfg.scenario, cfg.accuracy, axis, values, cfg.solver);
  std::ostringstream csv;
  write_csv(csv, rows);
  json arr = json::array();
  for (const auto& r : rows) {
    json j = to_json(r.solution);
    j["scenario_id"] = r.scenario_id;
    j["value"] = r.value;
    arr.push_back(std::move(j));
  }
  emit(cfg, csv.str(), {{"axis", axis_name}, {"rows", arr}});
  return kOk;
}

int run_validate(const Common& c, const std::string& suite, std::size_t trials, std::size_t samples) {
  const RunConfig cfg = resolve(c);
  const std::uint64_t seed = cfg.seed;
  std::vector<OracleReport> reports;
  auto add = [&](std::vector<OracleReport> r) { reports.insert(reports.end(), r.begin(), r.end()); };
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "prop1") { add(suite_prop1(trials ? trials : 200, seed)); known = true; }
  if (all || suite == "lemma2") { add(suite_lemma2(trials ? trials : 10000, seed)); known = true; }
  if (all || suite == "quant") { add(suite_quant(trials ? trials : 100000, seed)); known = true; }
  if (all || suite == "lemma4") { add(suite_lemma4(trials ? trials : 20, seed)); known = true; }
  if (all || suite == "lambertw") { add(suite_lambertw(trials ? trials : 50, seed)); known = true; }
  if (all || suite == "golden") { add(suite_golden()); known = true; }
  if (all || suite == "margin") { add(suite_margin(samples ? samples : 10000, seed)); known = true; }
  if (all || suite == "grid-full") {
    const NetworkModel net = build_network(cfg.network);
    add(suite_grid_full(net, cfg.scenario, cfg.accuracy, trials ? trials : 10, seed));
    known = true;
  }
  if (!known) throw ConfigError("unknown suite '" + suite + "'");

  json arr = json::array();
  bool pass = true;
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    pass = pass && r.pass;
  }
  const std::string text = arr.dump(2) + "\n";
  if (cfg.output.json.empty()) {
    std::cout << text;
  } else {
    write_text(cfg.output.json, text);
  }
  return pass ? kOk : kFailed;
}

int run_fit_r0(const Common& c, const std::string& input) {
  const RunConfig cfg = resolve(c);
  std::ifstream in(input);
  if (!in) throw ConfigError("cannot open samples file '" + input + "'");
  std::vector<std::pair<double, double>> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    double p, acc;
    if (std::sscanf(line.c_str(), "%lf,%lf", &p, &acc) != 2) {
      if (samples.empty()) continue;  // header row
      throw ConfigError("samples file: malformed line '" + line + "'");
    }
    samples.emplace_back(p, acc);
  }
  const auto fit = fit_r0(samples);
  const json j = {{"a", fit.a}, {"b", fit.b}, {"residual", fit.residual}, {"samples", samples.size()}};
  if (cfg.output.json.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text(cfg.output.json, j.dump(2) + "\n");
  }
  return kOk;
}

EchoConfig demo_echo() {
  EchoConfig e;
  auto& p = e.params;
  p.sensing_power = 0.05;
  p.chirps = 256;
  p.noise_psd = 1e-10;
  p.target = {2e-6, 3000.0, {0.8, 0.2}};
  p.clutter = {{1e-6, {2.0, 0.0}}, {4e-6, {0.0, 1.0}}};
  return e;
}

int run_sense_demo(const Common& c) {
  const RunConfig cfg = resolve(c);
  const EchoConfig e = cfg.echo.value_or(demo_echo());
  const SensingMatrix y = generate_echo(e.params, cfg.seed);
  const std::size_t min_dim = static_cast<std::size_t>(std::min(y.rows(), y.cols()));
  const SensingMatrix filtered = clutter_filter(y, e.r1, e.r2 ? e.r2 : min_dim);
  const Spectrogram s = spectrogram(filtered, e.window_len, e.hop);
  std::ostringstream csv;
  csv << "frame,bin,value\n";
  char buf[64];
  for (std::size_t f = 0; f < s.frames; ++f) {
    for (std::size_t b = 0; b < s.bins; ++b) {
      std::snprintf(buf, sizeof buf, "%.17g", s.at(f, b));
      csv << f << "," << b << "," << buf << "\n";
    }
  }
  json body = {{"frames", s.frames}, {"bins", s.bins}, {"zero_input", s.zero_input}};
  RunConfig shown = cfg;
  shown.echo = e;
  emit(shown, csv.str(), body);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimizing resource allocation for split edge inference"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON config file (defaults: built-in default scenario)");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { common.seed = s; common.seed_set = true; }, "RNG seed");
    sub->add_option("--out", common.out, "Output prefix; writes <prefix>.csv and <prefix>.json");
  };

  auto* solve = app.add_subcommand("solve", "Minimum-energy allocation over all splits and bit widths");
  add_common(solve);

  std::string axis, values;
  auto* sw = app.add_subcommand("sweep", "Re-solve the proposed scheme and baselines along one axis");
  add_common(sw);
  sw->add_option("--axis", axis, "t_max, r_t or snr (dB)")->required();
  sw->add_option("--values", values, "Comma-separated axis values")->required();

  std::string kind;
  auto* base = app.add_subcommand("baseline", "Solve one ablation baseline");
  add_common(base);
  base->add_option("--kind", kind, "on_server, on_device or no_prune")->required();

  std::string suite = "all";
  std::size_t trials = 0, samples = 0;
  auto* val = app.add_subcommand("validate", "Run oracle suites and print their reports");
  add_common(val);
  val->add_option("--suite", suite, "prop1, lemma2, quant, lemma4, lambertw, golden, margin, grid-full or all");
  val->add_option("--trials", trials, "Trials, points or contexts (suite default when 0)");
  val->add_option("--samples", samples, "Samples for the margin experiment");

  std::string input;
  auto* fit = app.add_subcommand("fit-r0", "Fit a * atan(b * P_S) to (P_S, accuracy) samples");
  add_common(fit);
  fit->add_option("--input", input, "CSV of P_S,accuracy rows")->required();

  auto* sense = app.add_subcommand("sense-demo", "Synthetic echo to clutter-filtered spectrogram CSV");
  add_common(sense);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*solve) return run_solve(common);
    if (*sw) return run_sweep(common, axis, values);
    if (*base) return run_baseline(common, kind);
    if (*val) return run_validate(common, suite, trials, samples);
    if (*fit) return run_fit_r0(common, input);
    if (*sense) return run_sense_demo(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kFailed;
}
