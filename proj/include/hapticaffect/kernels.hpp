#pragma once

// Inner loops of the waveform path. Each kernel has a portable scalar
// reference and, where the build and CPU allow, an AVX2 variant with
// bit-identical output.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace hapticaffect::kernels {

struct SineSpec {
  double frequency_hz;
  double amplitude;
  double sample_rate;
};

struct SampleStats {
  std::int64_t sum = 0;
  std::int64_t sum_squares = 0;
  std::int32_t peak_abs = 0;

  friend bool operator==(const SampleStats&, const SampleStats&) = default;
};

/// out[i] = round(amplitude * sin(2*pi*frequency*(first_index + i)/rate)),
/// round half away from zero, clamped to the int16 range.
using SineFillFn = void (*)(std::span<std::int16_t> out, const SineSpec& spec,
                            std::size_t first_index);

/// samples[i] = round(gains[i] * samples[i]), clamped to the int16 range.
using ApplyGainFn = void (*)(std::span<std::int16_t> samples,
                             std::span<const double> gains);

using StatsFn = SampleStats (*)(std::span<const std::int16_t> samples);

struct KernelTable {
  std::string_view name;
  SineFillFn sine_fill;
  ApplyGainFn apply_gain;
  StatsFn stats;
};

const KernelTable& scalar_table() noexcept;

/// Null when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table() noexcept;

/// The table used by the library. Chosen once: AVX2 when available, unless
/// the environment variable HAPTICAFFECT_KERNELS is set to "scalar".
const KernelTable& active() noexcept;

/// Scalar sin(2*pi*cycles) using the same range reduction and polynomial as
/// the vector kernels.
double sin_cycles(double cycles) noexcept;

}  // namespace hapticaffect::kernels
