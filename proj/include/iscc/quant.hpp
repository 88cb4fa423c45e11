#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace iscc {

class NetworkModel;

// Stochastic quantizer with 2^(Q-1) evenly spaced magnitude knobs on
// [f_min, f_max] plus a sign bit.
class QuantSpec {
 public:
  QuantSpec(int bits, double f_min, double f_max);

  int bits() const { return bits_; }
  double f_min() const { return f_min_; }
  double f_max() const { return f_max_; }
  std::size_t knob_count() const { return knobs_; }
  double step() const { return step_; }
  double knob(std::size_t i) const;

 private:
  int bits_;
  double f_min_;
  double f_max_;
  std::size_t knobs_;
  double step_;
};

struct QuantizedVector {
  std::vector<double> values;
  std::size_t clamped = 0;  // inputs whose magnitude fell outside [f_min, f_max]
};

// Single draw; |x| is assumed to be in range (callers clamp first).
double quantize_scalar(double x, const QuantSpec& spec, std::mt19937_64& rng);
QuantizedVector quantize_vector(std::span<const double> f, const QuantSpec& spec, std::uint64_t seed);
QuantizedVector quantize_vector(std::span<const double> f, const QuantSpec& spec, std::mt19937_64& rng);

double quant_error_bound(const NetworkModel& net, std::size_t split, const QuantSpec& spec);

// Smallest [0, max|f|] range covering every sample, padded by `headroom`.
QuantSpec calibrate_range(std::span<const double> samples, int bits, double headroom = 0.0);

}  // namespace iscc
