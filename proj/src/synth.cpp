#include "hapticaffect/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hapticaffect/error.hpp"

namespace hapticaffect {

bool is_supported_sample_rate(int rate) noexcept { return rate == 44100 || rate == 48000; }

WaveBuffer synthesize(const VibrationParams& params, int sample_rate) {
  if (!is_supported_sample_rate(sample_rate))
    throw InputError("unsupported sample rate " + std::to_string(sample_rate));
  if (!params.is_valid()) throw InputError("vibration parameters out of range");
  if (params.frequency_hz >= sample_rate / 2.0)
    throw AliasingError("frequency " + std::to_string(params.frequency_hz) + " Hz is at or above Nyquist");

  WaveBuffer buf;
  buf.sample_rate = sample_rate;
  buf.samples.resize(static_cast<std::size_t>(std::llround(params.duration_s * sample_rate)));
  const kernels::SineSpec spec{params.frequency_hz, static_cast<double>(params.amplitude),
                               static_cast<double>(sample_rate)};
  kernels::active().sine_fill(buf.samples, spec, 0);
  return buf;
}

std::size_t fade_samples(double ms, int sample_rate) {
  if (!std::isfinite(ms) || ms < 0.0) throw InputError("fade length must be a non-negative number");
  return static_cast<std::size_t>(std::floor(ms * sample_rate / 1000.0 + 0.5));
}

std::vector<double> raised_cosine_ramp(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
  return g;
}

WaveBuffer apply_envelope(WaveBuffer buf, const EnvelopeSpec& env) {
  const std::size_t in = fade_samples(env.fade_in_ms, buf.sample_rate);
  const std::size_t out = fade_samples(env.fade_out_ms, buf.sample_rate);
  if (in + out > buf.samples.size())
    throw InputError("fades need " + std::to_string(in + out) + " samples but buffer has " +
                     std::to_string(buf.samples.size()));

  const auto& k = kernels::active();
  if (in > 0) {
    const auto ramp = raised_cosine_ramp(in);
    k.apply_gain(std::span(buf.samples).first(in), ramp);
  }
  if (out > 0) {
    auto ramp = raised_cosine_ramp(out);
    std::reverse(ramp.begin(), ramp.end());  // last sample gets gain 0
    k.apply_gain(std::span(buf.samples).last(out), ramp);
  }
  return buf;
}

WaveBuffer render_stimulus(const VibrationParams& params, const EnvelopeSpec& env, int sample_rate) {
  return apply_envelope(synthesize(params, sample_rate), env);
}

kernels::SampleStats analyze(std::span<const std::int16_t> samples) {
  return kernels::active().stats(samples);
}

double rms(std::span<const std::int16_t> samples) {
  if (samples.empty()) return 0.0;
  return std::sqrt(static_cast<double>(analyze(samples).sum_squares) / static_cast<double>(samples.size()));
}

}  // namespace hapticaffect
