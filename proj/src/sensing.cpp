#include "iscc/sensing.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace iscc {

std::size_t EchoParams::fast_time_samples() const {
  return static_cast<std::size_t>(std::floor(sample_rate * chirp_duration + 1e-9));
}

void EchoParams::validate() const {
  if (!(sensing_power > 0.0)) throw std::invalid_argument("echo: sensing_power must be positive");
  if (!(chirp_duration > 0.0) || !(sample_rate > 0.0)) {
    throw std::invalid_argument("echo: chirp_duration and sample_rate must be positive");
  }
  if (fast_time_samples() < 1) throw std::invalid_argument("echo: fs * T0 must be >= 1");
  if (chirps < 1) throw std::invalid_argument("echo: need at least one chirp");
  if (!(noise_psd >= 0.0)) throw std::invalid_argument("echo: noise_psd must be >= 0");
  auto check_delay = [&](double d) {
    if (!(d >= 0.0 && d < chirp_duration)) throw std::invalid_argument("echo: path delay outside [0, T0)");
  };
  check_delay(target.delay);
  for (const auto& c : clutter) check_delay(c.delay);
}

namespace {

// Baseband linear up-chirp, periodic in the chirp duration.
std::complex<double> chirp_at(double t, double duration, double bandwidth) {
  double tau = std::fmod(t, duration);
  if (tau < 0.0) tau += duration;
  const double slope = bandwidth / duration;
  return std::polar(1.0, std::numbers::pi * slope * tau * tau);
}

}  // namespace

SensingMatrix generate_echo(const EchoParams& p, std::uint64_t seed) {
  p.validate();
  const std::size_t rows = p.fast_time_samples();
  const auto cols = static_cast<Eigen::Index>(p.chirps);
  SensingMatrix y = SensingMatrix::Zero(static_cast<Eigen::Index>(rows), cols);
  const double amp = std::sqrt(p.sensing_power);
  const double dt = 1.0 / p.sample_rate;

  // Static paths repeat identically every chirp.
  Eigen::VectorXcd static_part = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rows));
  Eigen::VectorXcd target_part = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const double t = static_cast<double>(r) * dt;
    for (const auto& c : p.clutter) {
      static_part[static_cast<Eigen::Index>(r)] +=
          amp * c.gain * chirp_at(t - c.delay, p.chirp_duration, p.chirp_bandwidth);
    }
    target_part[static_cast<Eigen::Index>(r)] =
        amp * p.target.gain * chirp_at(t - p.target.delay, p.chirp_duration, p.chirp_bandwidth);
  }
  for (Eigen::Index m = 0; m < cols; ++m) {
    const auto doppler =
        std::polar(1.0, 2.0 * std::numbers::pi * p.target.doppler * static_cast<double>(m) * p.chirp_duration);
    y.col(m) = static_part + doppler * target_part;
  }

  if (p.noise_psd > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01(0.0, std::sqrt(p.noise_psd * p.sample_rate / 2.0));
    for (Eigen::Index m = 0; m < cols; ++m) {
      for (Eigen::Index r = 0; r < y.rows(); ++r) {
        const double re = n01(rng);
        const double im = n01(rng);
        y(r, m) += std::complex<double>(re, im);
      }
    }
  }
  return y;
}

SensingMatrix clutter_filter(const SensingMatrix& y, std::size_t r1, std::size_t r2) {
  const auto min_dim = static_cast<std::size_t>(std::min(y.rows(), y.cols()));
  if (r1 < 1 || r1 > r2 || r2 > min_dim) throw std::invalid_argument("clutter_filter: need 1 <= r1 <= r2 <= min(rows, cols)");
  if (!y.allFinite()) throw std::invalid_argument("clutter_filter: non-finite input");

  Eigen::BDCSVD<SensingMatrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto first = static_cast<Eigen::Index>(r1 - 1);
  const auto count = static_cast<Eigen::Index>(r2 - r1 + 1);
  const auto& u = svd.matrixU();
  const auto& v = svd.matrixV();
  const auto& s = svd.singularValues();
  return u.middleCols(first, count) * s.segment(first, count).asDiagonal() *
         v.middleCols(first, count).adjoint();
}

std::size_t spectrogram_frames(std::size_t slow_time, std::size_t window_len, std::size_t hop) {
  if (window_len < 1 || hop < 1) throw std::invalid_argument("spectrogram: window_len and hop must be >= 1");
  if (window_len > slow_time) throw std::invalid_argument("spectrogram: window_len exceeds slow-time length");
  return 1 + (slow_time - window_len) / hop;
}

Spectrogram stft_magnitude(const Eigen::VectorXcd& slow_time, std::size_t window_len, std::size_t hop) {
  const auto m = static_cast<std::size_t>(slow_time.size());
  Spectrogram out;
  out.frames = spectrogram_frames(m, window_len, hop);
  out.bins = window_len;
  out.values.assign(out.frames * out.bins, 0.0);

  // Periodic Hann.
  std::vector<double> window(window_len, 1.0);
  if (window_len > 1) {
    for (std::size_t k = 0; k < window_len; ++k) {
      window[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                        static_cast<double>(window_len));
    }
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> frame(window_len), spectrum;
  for (std::size_t f = 0; f < out.frames; ++f) {
    for (std::size_t k = 0; k < window_len; ++k) {
      frame[k] = slow_time[static_cast<Eigen::Index>(f * hop + k)] * window[k];
    }
    fft.fwd(spectrum, frame);
    for (std::size_t k = 0; k < window_len; ++k) out.values[f * out.bins + k] = std::abs(spectrum[k]);
  }

  double norm_sq = 0.0;
  for (double v : out.values) norm_sq += v * v;
  if (norm_sq == 0.0) {
    out.zero_input = true;
    return out;
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& v : out.values) v *= inv;
  return out;
}

Spectrogram spectrogram(const SensingMatrix& ybar, std::size_t window_len, std::size_t hop) {
  const Eigen::VectorXcd slow_time = ybar.colwise().sum().transpose();
  return stft_magnitude(slow_time, window_len, hop);
}

SensingCost sensing_cost(double sensing_power, double chirp_duration, std::size_t chirps) {
  if (sensing_power < 0.0 || !(chirp_duration > 0.0)) {
    throw std::invalid_argument("sensing_cost: negative power or nonpositive chirp duration");
  }
  const double latency = chirp_duration * static_cast<double>(chirps);
  return {latency, sensing_power * latency};
}

}  // namespace iscc
