#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "iscc/accuracy.hpp"
#include "iscc/cost.hpp"
#include "iscc/netmodel.hpp"
#include "iscc/optimizer.hpp"
#include "iscc/sensing.hpp"

namespace iscc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WeightsSource {
  std::vector<double> laplace_rates;  // empty: unit expected Frobenius norm per layer
  std::uint64_t seed = 1;
  std::string file;                   // row-major weights in layer order; .bin = raw float64
};

struct NetworkConfig {
  std::vector<LayerSpec> layers;
  std::size_t input_dim = 0;
  std::vector<std::size_t> split_candidates;
  WeightsSource weights;
};

struct EchoConfig {
  EchoParams params;
  std::size_t window_len = 64;
  std::size_t hop = 32;
  std::size_t r1 = 2;
  std::size_t r2 = 0;  // 0: min(rows, cols)
};

struct OutputPaths {
  std::string csv;
  std::string json;
};

struct RunConfig {
  Scenario scenario;
  NetworkConfig network;
  AccuracyParams accuracy;
  std::optional<EchoConfig> echo;
  OptimizerOptions solver;
  std::uint64_t seed = 1;
  OutputPaths output;
};

// Default scenario on the LeNet-style template with synthetic weights.
RunConfig default_config();

// Fail-closed: unknown keys and malformed values raise ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Fully resolved form, defaults expanded.
nlohmann::json to_json(const RunConfig& cfg);

NetworkModel build_network(const NetworkConfig& cfg);

double snr_to_db(double linear);
double db_to_snr(double db);

}  // namespace iscc
