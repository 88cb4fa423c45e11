#include "iscc/quant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iscc/accuracy.hpp"

namespace iscc {

QuantSpec::QuantSpec(int bits, double f_min, double f_max) : bits_(bits), f_min_(f_min), f_max_(f_max) {
  if (bits < 2) throw std::invalid_argument("QuantSpec: need at least 2 bits (Q=1 leaves no interval)");
  if (bits > 52) throw std::invalid_argument("QuantSpec: more than 52 bits is not representable");
  if (!(f_min >= 0.0 && f_min < f_max)) throw std::invalid_argument("QuantSpec: need 0 <= f_min < f_max");
  knobs_ = std::size_t{1} << (bits - 1);
  step_ = (f_max - f_min) / static_cast<double>(knobs_ - 1);
}

double QuantSpec::knob(std::size_t i) const {
  if (i + 1 == knobs_) return f_max_;
  return f_min_ + step_ * static_cast<double>(i);
}

double quantize_scalar(double x, const QuantSpec& spec, std::mt19937_64& rng) {
  const double sign = std::signbit(x) ? -1.0 : 1.0;
  const double mag = std::abs(x);
  auto i = static_cast<std::size_t>(std::max(0.0, std::floor((mag - spec.f_min()) / spec.step())));
  i = std::min(i, spec.knob_count() - 2);
  const double lo = spec.knob(i);
  const double hi = spec.knob(i + 1);
  const double p_up = (mag - lo) / (hi - lo);
  // Always draw so the stream position does not depend on the data.
  const double draw = std::generate_canonical<double, 53>(rng);
  if (mag == lo) return sign * lo;
  if (mag == hi) return sign * hi;
  return sign * (draw < p_up ? hi : lo);
}

QuantizedVector quantize_vector(std::span<const double> f, const QuantSpec& spec, std::mt19937_64& rng) {
  QuantizedVector out;
  out.values.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double x = f[i];
    const double mag = std::abs(x);
    if (mag < spec.f_min() || mag > spec.f_max()) {
      ++out.clamped;
      x = std::copysign(std::clamp(mag, spec.f_min(), spec.f_max()), x);
    }
    out.values[i] = quantize_scalar(x, spec, rng);
  }
  return out;
}

QuantizedVector quantize_vector(std::span<const double> f, const QuantSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return quantize_vector(f, spec, rng);
}

double quant_error_bound(const NetworkModel& net, std::size_t split, const QuantSpec& spec) {
  return quant_delta(net, split, spec.f_min(), spec.f_max()) * v(spec.bits());
}

QuantSpec calibrate_range(std::span<const double> samples, int bits, double headroom) {
  double hi = 0.0;
  for (double s : samples) hi = std::max(hi, std::abs(s));
  if (!(hi > 0.0)) hi = 1.0;
  return QuantSpec(bits, 0.0, hi * (1.0 + headroom));
}

}  // namespace iscc
