#include "iscc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace iscc {

using nlohmann::json;

double snr_to_db(double linear) { return 10.0 * std::log10(linear); }
double db_to_snr(double db) { return std::pow(10.0, db / 10.0); }

RunConfig default_config() {
  RunConfig cfg;
  const auto net = lenet_template();
  cfg.network.layers = net.layers();
  cfg.network.input_dim = net.input_dim();
  cfg.network.split_candidates = net.split_candidates();
  cfg.network.weights.seed = 1;
  return cfg;
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

LayerSpec parse_layer(const json& j, const std::string& where) {
  check_keys(j, {"kind", "alpha", "beta", "gamma", "psi", "gamma_prev", "n", "n_prev"}, where);
  std::string kind;
  read(j, "kind", kind, where);
  LayerSpec s;
  try {
    s.kind = layer_kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  read(j, "alpha", s.alpha, where);
  read(j, "beta", s.beta, where);
  read(j, "gamma", s.gamma, where);
  read(j, "psi", s.psi, where);
  read(j, "gamma_prev", s.gamma_prev, where);
  read(j, "n", s.n, where);
  read(j, "n_prev", s.n_prev, where);
  return s;
}

json layer_json(const LayerSpec& s) {
  json j;
  j["kind"] = to_string(s.kind);
  switch (s.kind) {
    case LayerKind::Conv:
      j["alpha"] = s.alpha;
      j["beta"] = s.beta;
      j["gamma"] = s.gamma;
      j["psi"] = s.psi;
      j["gamma_prev"] = s.gamma_prev;
      break;
    case LayerKind::MP:
      j["alpha"] = s.alpha;
      j["beta"] = s.beta;
      j["gamma"] = s.gamma;
      j["psi"] = s.psi;
      break;
    case LayerKind::FC:
      j["n"] = s.n;
      j["n_prev"] = s.n_prev;
      break;
  }
  return j;
}

std::vector<double> read_weight_file(const std::string& path) {
  std::vector<double> values;
  const bool binary = path.size() >= 4 && path.substr(path.size() - 4) == ".bin";
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw ConfigError("cannot open weights file '" + path + "'");
  if (binary) {
    double x;
    while (in.read(reinterpret_cast<char*>(&x), sizeof x)) values.push_back(x);
  } else {
    double x;
    while (in >> x) values.push_back(x);
    if (!in.eof()) throw ConfigError("weights file '" + path + "': non-numeric token");
  }
  return values;
}

std::complex<double> read_gain(const json& obj, const std::string& where) {
  double re = 0.0, im = 0.0;
  read(obj, "gain_re", re, where);
  read(obj, "gain_im", im, where);
  return {re, im};
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig cfg = default_config();
  check_keys(j, {"scenario", "network", "accuracy", "echo", "solver", "seed", "output"}, "config");

  if (j.contains("scenario")) {
    const auto& s = j["scenario"];
    const std::string w = "scenario";
    check_keys(s, {"t_max", "r_t", "p_max", "nu_max", "nu_s", "kappa", "t0", "m_chirps", "fs", "bandwidth", "snr_db",
                   "q_max"},
               w);
    auto& sc = cfg.scenario;
    read(s, "t_max", sc.t_max, w);
    read(s, "r_t", sc.r_t, w);
    read(s, "p_max", sc.p_max, w);
    read(s, "nu_max", sc.nu_max, w);
    read(s, "nu_s", sc.nu_s, w);
    read(s, "kappa", sc.kappa, w);
    read(s, "t0", sc.t0, w);
    read(s, "m_chirps", sc.chirps, w);
    read(s, "fs", sc.fs, w);
    read(s, "bandwidth", sc.bandwidth, w);
    read(s, "q_max", sc.q_max, w);
    if (s.contains("snr_db")) {
      double db = 0.0;
      read(s, "snr_db", db, w);
      sc.snr = db_to_snr(db);
    }
  }

  if (j.contains("network")) {
    const auto& n = j["network"];
    const std::string w = "network";
    check_keys(n, {"layers", "input_dim", "split_candidates", "weights"}, w);
    if (n.contains("layers")) {
      if (!n["layers"].is_array()) throw ConfigError("network.layers: expected an array");
      cfg.network.layers.clear();
      for (std::size_t i = 0; i < n["layers"].size(); ++i) {
        cfg.network.layers.push_back(parse_layer(n["layers"][i], "network.layers[" + std::to_string(i) + "]"));
      }
      cfg.network.split_candidates.clear();
    }
    read(n, "input_dim", cfg.network.input_dim, w);
    read(n, "split_candidates", cfg.network.split_candidates, w);
    if (n.contains("weights")) {
      const auto& wt = n["weights"];
      check_keys(wt, {"laplace_rates", "seed", "file"}, "network.weights");
      read(wt, "laplace_rates", cfg.network.weights.laplace_rates, "network.weights");
      read(wt, "seed", cfg.network.weights.seed, "network.weights");
      read(wt, "file", cfg.network.weights.file, "network.weights");
    }
  }

  if (j.contains("accuracy")) {
    const auto& a = j["accuracy"];
    const std::string w = "accuracy";
    check_keys(a, {"a", "b", "min_score", "margin_comp", "margin_exponent", "f_min", "f_max", "r0_table"}, w);
    auto& ap = cfg.accuracy;
    read(a, "a", ap.a, w);
    read(a, "b", ap.b, w);
    read(a, "min_score", ap.min_score, w);
    read(a, "margin_comp", ap.margin_comp, w);
    read(a, "margin_exponent", ap.margin_exponent, w);
    read(a, "f_min", ap.f_min, w);
    read(a, "f_max", ap.f_max, w);
    read(a, "r0_table", ap.r0_table, w);
  }

  if (j.contains("echo")) {
    const auto& e = j["echo"];
    const std::string w = "echo";
    check_keys(e, {"sensing_power", "chirp_duration", "chirps", "sample_rate", "noise_psd", "chirp_bandwidth", "target",
                   "clutter", "window_len", "hop", "r1", "r2"},
               w);
    EchoConfig ec;
    auto& p = ec.params;
    read(e, "sensing_power", p.sensing_power, w);
    read(e, "chirp_duration", p.chirp_duration, w);
    read(e, "chirps", p.chirps, w);
    read(e, "sample_rate", p.sample_rate, w);
    read(e, "noise_psd", p.noise_psd, w);
    read(e, "chirp_bandwidth", p.chirp_bandwidth, w);
    read(e, "window_len", ec.window_len, w);
    read(e, "hop", ec.hop, w);
    read(e, "r1", ec.r1, w);
    read(e, "r2", ec.r2, w);
    if (e.contains("target")) {
      const auto& t = e["target"];
      check_keys(t, {"delay", "doppler", "gain_re", "gain_im"}, "echo.target");
      read(t, "delay", p.target.delay, "echo.target");
      read(t, "doppler", p.target.doppler, "echo.target");
      p.target.gain = read_gain(t, "echo.target");
    }
    if (e.contains("clutter")) {
      if (!e["clutter"].is_array()) throw ConfigError("echo.clutter: expected an array");
      for (std::size_t i = 0; i < e["clutter"].size(); ++i) {
        const auto& c = e["clutter"][i];
        const std::string cw = "echo.clutter[" + std::to_string(i) + "]";
        check_keys(c, {"delay", "gain_re", "gain_im"}, cw);
        EchoPath path;
        read(c, "delay", path.delay, cw);
        path.gain = read_gain(c, cw);
        p.clutter.push_back(path);
      }
    }
    cfg.echo = ec;
  }

  if (j.contains("solver")) {
    const auto& s = j["solver"];
    const std::string w = "solver";
    check_keys(s, {"eps_rho", "eps_mu", "eps_w", "rel_tol", "max_iter", "parallel"}, w);
    read(s, "eps_rho", cfg.solver.tol.eps_rho, w);
    read(s, "eps_mu", cfg.solver.tol.eps_mu, w);
    read(s, "eps_w", cfg.solver.tol.eps_w, w);
    read(s, "rel_tol", cfg.solver.rel_tol, w);
    read(s, "max_iter", cfg.solver.max_iter, w);
    read(s, "parallel", cfg.solver.parallel, w);
  }

  read(j, "seed", cfg.seed, "config");

  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, {"csv", "json"}, "output");
    read(o, "csv", cfg.output.csv, "output");
    read(o, "json", cfg.output.json, "output");
  }

  try {
    cfg.scenario.validate();
    cfg.accuracy.validate();
    if (cfg.echo) cfg.echo->params.validate();
    for (const auto& l : cfg.network.layers) l.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.solver.tol.eps_rho > 0.0 && cfg.solver.tol.eps_mu > 0.0 && cfg.solver.tol.eps_w > 0.0 &&
        cfg.solver.rel_tol > 0.0 && cfg.solver.max_iter >= 1)) {
    throw ConfigError("solver: tolerances must be positive and max_iter >= 1");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  const auto& sc = cfg.scenario;
  j["scenario"] = {{"t_max", sc.t_max},   {"r_t", sc.r_t},     {"p_max", sc.p_max},
                   {"nu_max", sc.nu_max}, {"nu_s", sc.nu_s},   {"kappa", sc.kappa},
                   {"t0", sc.t0},         {"m_chirps", sc.chirps}, {"fs", sc.fs},
                   {"bandwidth", sc.bandwidth}, {"snr_db", snr_to_db(sc.snr)}, {"q_max", sc.q_max}};

  json layers = json::array();
  for (const auto& l : cfg.network.layers) layers.push_back(layer_json(l));
  json weights = {{"seed", cfg.network.weights.seed}};
  if (!cfg.network.weights.file.empty()) weights["file"] = cfg.network.weights.file;
  if (!cfg.network.weights.laplace_rates.empty()) weights["laplace_rates"] = cfg.network.weights.laplace_rates;
  auto splits = cfg.network.split_candidates;
  if (splits.empty()) {
    for (std::size_t l = 0; l <= cfg.network.layers.size(); ++l) splits.push_back(l);
  }
  j["network"] = {{"layers", layers},
                  {"input_dim", cfg.network.input_dim},
                  {"split_candidates", splits},
                  {"weights", weights}};

  const auto& ap = cfg.accuracy;
  j["accuracy"] = {{"a", ap.a},
                   {"b", ap.b},
                   {"min_score", ap.min_score},
                   {"margin_comp", ap.margin_comp},
                   {"margin_exponent", ap.margin_exponent},
                   {"f_min", ap.f_min},
                   {"f_max", ap.f_max},
                   {"r0_table", ap.r0_table}};

  if (cfg.echo) {
    const auto& e = *cfg.echo;
    const auto& p = e.params;
    json clutter = json::array();
    for (const auto& c : p.clutter) {
      clutter.push_back({{"delay", c.delay}, {"gain_re", c.gain.real()}, {"gain_im", c.gain.imag()}});
    }
    j["echo"] = {{"sensing_power", p.sensing_power},
                 {"chirp_duration", p.chirp_duration},
                 {"chirps", p.chirps},
                 {"sample_rate", p.sample_rate},
                 {"noise_psd", p.noise_psd},
                 {"chirp_bandwidth", p.chirp_bandwidth},
                 {"target",
                  {{"delay", p.target.delay},
                   {"doppler", p.target.doppler},
                   {"gain_re", p.target.gain.real()},
                   {"gain_im", p.target.gain.imag()}}},
                 {"clutter", clutter},
                 {"window_len", e.window_len},
                 {"hop", e.hop},
                 {"r1", e.r1},
                 {"r2", e.r2}};
  }

  const auto& s = cfg.solver;
  j["solver"] = {{"eps_rho", s.tol.eps_rho}, {"eps_mu", s.tol.eps_mu},   {"eps_w", s.tol.eps_w},
                 {"rel_tol", s.rel_tol},     {"max_iter", s.max_iter}, {"parallel", s.parallel}};
  j["seed"] = cfg.seed;
  j["output"] = {{"csv", cfg.output.csv}, {"json", cfg.output.json}};
  return j;
}

NetworkModel build_network(const NetworkConfig& cfg) {
  NetworkModel net;
  try {
    net = NetworkModel(cfg.layers, cfg.input_dim, cfg.split_candidates);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("network: ") + e.what());
  }

  if (!cfg.weights.file.empty()) {
    const auto values = read_weight_file(cfg.weights.file);
    std::size_t pos = 0;
    for (std::size_t l = 1; l <= net.depth(); ++l) {
      const auto& s = net.layer(l);
      if (!s.weighted()) continue;
      Eigen::MatrixXd w(s.weight_rows(), s.weight_cols());
      if (pos + static_cast<std::size_t>(w.size()) > values.size()) {
        throw ConfigError("weights file '" + cfg.weights.file + "' is shorter than the network");
      }
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = values[pos++];
      }
      net.set_weights(l, std::move(w));
    }
    if (pos != values.size()) throw ConfigError("weights file '" + cfg.weights.file + "' is longer than the network");
    return net;
  }

  std::vector<double> rates = cfg.weights.laplace_rates;
  std::size_t weighted = 0;
  for (const auto& l : net.layers()) weighted += l.weighted() ? 1 : 0;
  if (rates.empty()) {
    for (const auto& l : net.layers()) {
      if (l.weighted()) rates.push_back(unit_norm_laplace_rate(l.param_count()));
    }
  }
  if (rates.size() != weighted) {
    throw ConfigError("network.weights.laplace_rates: need one rate per weighted layer (" + std::to_string(weighted) +
                      ")");
  }
  for (double r : rates) {
    if (!(r > 0.0)) throw ConfigError("network.weights.laplace_rates: rates must be positive");
  }
  fill_laplace_weights(net, rates, cfg.weights.seed);
  return net;
}

}  // namespace iscc
