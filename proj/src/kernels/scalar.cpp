#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "hapticaffect/kernels.hpp"
#include "sine_poly.hpp"

namespace hapticaffect::kernels {

namespace {

using detail::kInt16Max;
using detail::kInt16Min;
using detail::kSinCoeff;
using detail::kTwoPi;

// Half away from zero; same result as std::round for finite y.
inline double round_half_away(double y) {
  double t = std::trunc(y);
  const double d = y - t;
  if (d >= 0.5) t += 1.0;
  if (d <= -0.5) t -= 1.0;
  return t;
}

inline std::int16_t to_int16(double y) {
  return static_cast<std::int16_t>(std::clamp(round_half_away(y), kInt16Min, kInt16Max));
}

void sine_fill_scalar(std::span<std::int16_t> out, const SineSpec& spec, std::size_t first_index) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double cycles = static_cast<double>(first_index + i) * spec.frequency_hz / spec.sample_rate;
    out[i] = to_int16(spec.amplitude * sin_cycles(cycles));
  }
}

void apply_gain_scalar(std::span<std::int16_t> samples, std::span<const double> gains) {
  const std::size_t n = std::min(samples.size(), gains.size());
  for (std::size_t i = 0; i < n; ++i) samples[i] = to_int16(gains[i] * static_cast<double>(samples[i]));
}

SampleStats stats_scalar(std::span<const std::int16_t> samples) {
  SampleStats s;
  for (const std::int16_t v : samples) {
    const std::int64_t x = v;
    s.sum += x;
    s.sum_squares += x * x;
    s.peak_abs = std::max<std::int32_t>(s.peak_abs, static_cast<std::int32_t>(x < 0 ? -x : x));
  }
  return s;
}

}  // namespace

double sin_cycles(double cycles) noexcept {
  double r = cycles - std::nearbyint(cycles);
  if (r > 0.25) r = 0.5 - r;
  if (r < -0.25) r = -0.5 - r;
  const double t = r * kTwoPi;
  const double z = t * t;
  double p = kSinCoeff[10];
  for (int k = 9; k >= 0; --k) p = p * z + kSinCoeff[k];
  return t * p;
}

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{"scalar", &sine_fill_scalar, &apply_gain_scalar, &stats_scalar};
  return table;
}

}  // namespace hapticaffect::kernels
