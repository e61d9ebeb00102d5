#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hapticaffect/kernels.hpp"
#include "hapticaffect/mapping.hpp"

namespace hapticaffect {

inline constexpr int kDefaultSampleRate = 44100;

bool is_supported_sample_rate(int rate) noexcept;

/// Mono signed 16-bit PCM. Immutable once handed to playback.
struct WaveBuffer {
  std::vector<std::int16_t> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const noexcept { return samples.size(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples.size()) / sample_rate;
  }

  friend bool operator==(const WaveBuffer&, const WaveBuffer&) = default;
};

enum class EnvelopeShape { RaisedCosine };

struct EnvelopeSpec {
  double fade_in_ms = 5.0;
  double fade_out_ms = 5.0;
  EnvelopeShape shape = EnvelopeShape::RaisedCosine;
};

/// Renders round(duration * rate) samples of a zero-phase sine.
/// Throws InputError on invalid params / rate, AliasingError at or above Nyquist.
WaveBuffer synthesize(const VibrationParams& params, int sample_rate = kDefaultSampleRate);

/// Ramp length in samples for a fade of `ms` at `sample_rate`, rounded half-up.
std::size_t fade_samples(double ms, int sample_rate);

/// Raised-cosine gain 0.5 * (1 - cos(pi * i / n)) for i in [0, n).
std::vector<double> raised_cosine_ramp(std::size_t n);

/// Multiplies the first and last ramps; interior samples are untouched.
/// Throws InputError if the two ramps do not fit in the buffer.
WaveBuffer apply_envelope(WaveBuffer buf, const EnvelopeSpec& env);

/// synthesize + apply_envelope.
WaveBuffer render_stimulus(const VibrationParams& params, const EnvelopeSpec& env,
                           int sample_rate = kDefaultSampleRate);

kernels::SampleStats analyze(std::span<const std::int16_t> samples);
double rms(std::span<const std::int16_t> samples);

// Canonical 44-byte-header RIFF/WAVE, PCM 16-bit mono, little-endian.
inline constexpr std::size_t kWavHeaderSize = 44;

std::vector<std::uint8_t> encode_wav(const WaveBuffer& buf);
WaveBuffer decode_wav(std::span<const std::uint8_t> bytes);

/// Throws IoError naming the path on failure.
void write_wav(const WaveBuffer& buf, const std::filesystem::path& path);
WaveBuffer read_wav(const std::filesystem::path& path);

}  // namespace hapticaffect
