#pragma once

#include <cstdint>
#include <string_view>

#include "hapticaffect/affect.hpp"

namespace hapticaffect {

inline constexpr double kMinFrequencyHz = 60.0;
inline constexpr double kMaxFrequencyHz = 500.0;
inline constexpr std::int32_t kMinAmplitude = 8000;
inline constexpr std::int32_t kMaxAmplitude = 32767;
inline constexpr double kBaseDurationS = 0.5;

/// One sine-burst stimulus.
struct VibrationParams {
  double frequency_hz = kMinFrequencyHz;
  std::int32_t amplitude = kMinAmplitude;  // peak, 16-bit sample scale
  double duration_s = kBaseDurationS;

  bool is_valid() const noexcept;

  friend bool operator==(const VibrationParams&, const VibrationParams&) = default;
};

enum class CharClass { Hiragana, Katakana, Kanji, Other };

const char* to_string(CharClass c) noexcept;

/// Linear map of valence 0..100 onto 60..500 Hz. Clamps out-of-range input;
/// throws InputError for NaN / infinity.
double valence_to_frequency(double valence);

/// Linear map of arousal 0..100 onto 8000..32767, rounded half-up. Clamps
/// out-of-range input; throws InputError for NaN / infinity.
std::int32_t arousal_to_amplitude(double arousal);

CharClass classify_char(char32_t c) noexcept;

struct CharCounts {
  std::size_t hiragana = 0;
  std::size_t katakana = 0;
  std::size_t kanji = 0;
  std::size_t other = 0;
};

CharCounts count_char_classes(std::string_view utf8);

/// Stimulus length in tenths of a second: 5 + kana + 2 * kanji.
std::int64_t duration_tenths(std::string_view utf8);

/// 0.5 s + 0.1 s per hiragana/katakana + 0.2 s per kanji.
double compute_duration(std::string_view utf8);

VibrationParams map_affect(const AffectScore& score, std::string_view utf8);

}  // namespace hapticaffect
