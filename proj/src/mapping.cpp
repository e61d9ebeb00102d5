#include "hapticaffect/mapping.hpp"

#include <algorithm>
#include <cmath>

#include "hapticaffect/error.hpp"
#include "hapticaffect/utf8.hpp"

namespace hapticaffect {

namespace {

double clamp_percent(double v, const char* what) {
  if (!std::isfinite(v)) throw InputError(std::string(what) + " is not finite");
  return std::clamp(v, 0.0, 100.0);
}

}  // namespace

bool VibrationParams::is_valid() const noexcept {
  return frequency_hz >= kMinFrequencyHz && frequency_hz <= kMaxFrequencyHz &&
         amplitude >= kMinAmplitude && amplitude <= kMaxAmplitude &&
         std::isfinite(duration_s) && duration_s >= kBaseDurationS;
}

const char* to_string(CharClass c) noexcept {
  switch (c) {
    case CharClass::Hiragana: return "hiragana";
    case CharClass::Katakana: return "katakana";
    case CharClass::Kanji: return "kanji";
    case CharClass::Other: return "other";
  }
  return "other";
}

double valence_to_frequency(double valence) {
  const double v = clamp_percent(valence, "valence");
  return kMinFrequencyHz + v * (kMaxFrequencyHz - kMinFrequencyHz) / 100.0;
}

std::int32_t arousal_to_amplitude(double arousal) {
  const double a = clamp_percent(arousal, "arousal");
  const double amp = kMinAmplitude + a * (kMaxAmplitude - kMinAmplitude) / 100.0;
  return static_cast<std::int32_t>(std::floor(amp + 0.5));
}

CharClass classify_char(char32_t c) noexcept {
  // Hiragana block minus the combining / spacing voicing marks U+3099..309C.
  if ((c >= 0x3041 && c <= 0x3096) || (c >= 0x309D && c <= 0x309F)) return CharClass::Hiragana;
  // Katakana block minus the middle dot U+30FB.
  if ((c >= 0x30A1 && c <= 0x30FA) || (c >= 0x30FC && c <= 0x30FE)) return CharClass::Katakana;
  // CJK Unified Ideographs and Extension A.
  if ((c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF)) return CharClass::Kanji;
  return CharClass::Other;
}

CharCounts count_char_classes(std::string_view utf8) {
  CharCounts counts;
  utf8::for_each_scalar(utf8, [&](char32_t c) {
    switch (classify_char(c)) {
      case CharClass::Hiragana: ++counts.hiragana; break;
      case CharClass::Katakana: ++counts.katakana; break;
      case CharClass::Kanji: ++counts.kanji; break;
      case CharClass::Other: ++counts.other; break;
    }
  });
  return counts;
}

std::int64_t duration_tenths(std::string_view utf8) {
  const CharCounts n = count_char_classes(utf8);
  return 5 + static_cast<std::int64_t>(n.hiragana + n.katakana) + 2 * static_cast<std::int64_t>(n.kanji);
}

double compute_duration(std::string_view utf8) {
  return static_cast<double>(duration_tenths(utf8)) / 10.0;
}

VibrationParams map_affect(const AffectScore& score, std::string_view utf8) {
  if (!score.is_valid(1e-6)) throw InputError("affect score violates axis or range invariants");
  return VibrationParams{valence_to_frequency(score.pleasure), arousal_to_amplitude(score.arousal),
                         compute_duration(utf8)};
}

}  // namespace hapticaffect
