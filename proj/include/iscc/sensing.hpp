#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace iscc {

struct EchoPath {
  double delay = 0.0;  // seconds, < chirp_duration
  std::complex<double> gain{0.0, 0.0};
};

struct EchoTarget {
  double delay = 0.0;
  double doppler = 0.0;  // Hz
  std::complex<double> gain{0.0, 0.0};
};

struct EchoParams {
  double sensing_power = 0.1;     // W
  double chirp_duration = 1e-5;   // s
  std::size_t chirps = 256;
  double sample_rate = 1e7;       // Hz
  EchoTarget target;
  std::vector<EchoPath> clutter;
  double noise_psd = 0.0;         // W/Hz
  double chirp_bandwidth = 1e6;   // Hz

  std::size_t fast_time_samples() const;
  void validate() const;
};

// Fast-time (rows) x slow-time (columns).
using SensingMatrix = Eigen::MatrixXcd;

SensingMatrix generate_echo(const EchoParams& p, std::uint64_t seed);

// Keeps singular components r1..r2 (1-based, descending order).
SensingMatrix clutter_filter(const SensingMatrix& y, std::size_t r1, std::size_t r2);

struct Spectrogram {
  std::vector<double> values;  // frame-major, frames * bins entries
  std::size_t frames = 0;
  std::size_t bins = 0;
  bool zero_input = false;

  double at(std::size_t frame, std::size_t bin) const { return values[frame * bins + bin]; }
};

std::size_t spectrogram_frames(std::size_t slow_time, std::size_t window_len, std::size_t hop);
// STFT of an already-aggregated slow-time sequence (Hann window, magnitudes,
// unit-norm output).
Spectrogram stft_magnitude(const Eigen::VectorXcd& slow_time, std::size_t window_len, std::size_t hop);
Spectrogram spectrogram(const SensingMatrix& ybar, std::size_t window_len, std::size_t hop);

struct SensingCost {
  double latency = 0.0;  // T_sen
  double energy = 0.0;   // E_sen
};

SensingCost sensing_cost(double sensing_power, double chirp_duration, std::size_t chirps);

}  // namespace iscc
