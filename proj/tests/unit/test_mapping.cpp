#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "hapticaffect/error.hpp"
#include "hapticaffect/mapping.hpp"
#include "hapticaffect/utf8.hpp"
#include "oracles.hpp"

using namespace hapticaffect;

TEST_CASE("frequency endpoints") {
  CHECK(valence_to_frequency(0.0) == 60.0);
  CHECK(valence_to_frequency(100.0) == 500.0);
  CHECK(valence_to_frequency(50.0) == 280.0);
  CHECK(valence_to_frequency(25.0) == doctest::Approx(170.0).epsilon(1e-12));
}

TEST_CASE("frequency clamps and rejects non-finite input") {
  CHECK(valence_to_frequency(-10.0) == 60.0);
  CHECK(valence_to_frequency(250.0) == 500.0);
  CHECK_THROWS_AS(valence_to_frequency(std::numeric_limits<double>::quiet_NaN()), InputError);
  CHECK_THROWS_AS(valence_to_frequency(std::numeric_limits<double>::infinity()), InputError);
}

TEST_CASE("frequency is linear and monotone") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    const double fa = valence_to_frequency(a), fb = valence_to_frequency(b);
    CHECK(fa <= fb);
    CHECK(std::fabs(fa - (60.0 + a * 440.0 / 100.0)) <= 1e-9);
    CHECK(fa >= kMinFrequencyHz);
    CHECK(fb <= kMaxFrequencyHz);
  }
}

TEST_CASE("amplitude endpoints and half-up rounding") {
  CHECK(arousal_to_amplitude(0.0) == 8000);
  CHECK(arousal_to_amplitude(100.0) == 32767);
  CHECK(arousal_to_amplitude(50.0) == 20384);  // 20383.5
  CHECK(arousal_to_amplitude(-1.0) == 8000);
  CHECK(arousal_to_amplitude(101.0) == 32767);
  CHECK_THROWS_AS(arousal_to_amplitude(std::nan("")), InputError);
}

TEST_CASE("amplitude is non-decreasing and matches the rounded line") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    CHECK(arousal_to_amplitude(a) <= arousal_to_amplitude(b));
    const double exact = 8000.0 + a * 24767.0 / 100.0;
    CHECK(std::abs(arousal_to_amplitude(a) - exact) <= 0.5 + 1e-9);
  }
  std::int32_t prev = 0;
  for (int k = 0; k <= 10000; ++k) {
    const std::int32_t amp = arousal_to_amplitude(k / 100.0);
    CHECK(amp >= prev);
    prev = amp;
  }
}

TEST_CASE("character classes") {
  CHECK(classify_char(U'あ') == CharClass::Hiragana);
  CHECK(classify_char(U'ゝ') == CharClass::Hiragana);
  CHECK(classify_char(U'ア') == CharClass::Katakana);
  CHECK(classify_char(U'ー') == CharClass::Katakana);
  CHECK(classify_char(U'漢') == CharClass::Kanji);
  CHECK(classify_char(U'㐀') == CharClass::Kanji);
  CHECK(classify_char(U'・') == CharClass::Other);
  CHECK(classify_char(U'。') == CharClass::Other);
  CHECK(classify_char(U'a') == CharClass::Other);
  CHECK(classify_char(U'ｱ') == CharClass::Other);  // half-width katakana
}

TEST_CASE("duration examples") {
  CHECK(compute_duration("") == 0.5);
  CHECK(compute_duration("あいうえお") == 1.0);
  CHECK(compute_duration("漢字だよ") == 1.1);
  CHECK(compute_duration("Hello, world!") == 0.5);
  CHECK(compute_duration("カタカナ") == doctest::Approx(0.9));
  CHECK(duration_tenths("今日はいい天気ですね。") == 5 + 6 + 2 * 4);
}

TEST_CASE("malformed UTF-8 counts as other") {
  CHECK(duration_tenths("\xE3\x81") == 5);
  CHECK(duration_tenths("\xFF\xFE\xE3\x81\x82") == 6);
  const CharCounts c = count_char_classes("a\xC3");
  CHECK(c.other == 2);
}

namespace {

std::string random_text(std::mt19937_64& rng) {
  static const char32_t pool[] = {U'a', U'Z', U' ', U'!', U'あ', U'ん', U'ゞ', U'ア', U'ヴ', U'ー', U'漢',
                                  U'字', U'㐂', U'鿿', U'。', U'、', U'Ａ', U'😀', U'é', U'ｶ'};
  std::string s;
  const auto len = rng() % 40;
  for (std::size_t i = 0; i < len; ++i) s += oracle::encode_utf8(pool[rng() % std::size(pool)]);
  return s;
}

}  // namespace

TEST_CASE("duration agrees with the oracle and is additive") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const std::string a = random_text(rng), b = random_text(rng);
    CAPTURE(a);
    CAPTURE(b);
    CHECK(duration_tenths(a) == oracle::tenths(a));
    CHECK(duration_tenths(a + b) == duration_tenths(a) + duration_tenths(b) - 5);
    CHECK(std::fabs((compute_duration(a + b) - 0.5) - (compute_duration(a) - 0.5) - (compute_duration(b) - 0.5)) <=
          1e-9);
  }
}

TEST_CASE("utf8 decoding round trip") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 200; ++i) {
    const std::string s = random_text(rng);
    std::string rebuilt;
    utf8::for_each_scalar(s, [&](char32_t c) { utf8::append(rebuilt, c); });
    CHECK(rebuilt == s);
  }
}

TEST_CASE("map_affect combines the three rules") {
  const VibrationParams p = map_affect(AffectScore{50, 50, 50, 50}, "漢字だよ");
  CHECK(p.frequency_hz == 280.0);
  CHECK(p.amplitude == 20384);
  CHECK(p.duration_s == 1.1);
  CHECK(p.is_valid());
  const VibrationParams hi = map_affect(AffectScore{100, 0, 100, 0}, "");
  CHECK(hi == VibrationParams{500.0, 32767, 0.5});
}
