// Compiled with -mavx2 (and without FMA). Only reached after a runtime CPU
// check in dispatch.cpp.

#include <immintrin.h>

#include <algorithm>

#include "hapticaffect/kernels.hpp"
#include "sine_poly.hpp"

namespace hapticaffect::kernels {

namespace {

using detail::kInt16Max;
using detail::kInt16Min;
using detail::kSinCoeff;
using detail::kTwoPi;

inline __m256d round_half_away(__m256d y) {
  const __m256d t = _mm256_round_pd(y, _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
  const __m256d d = _mm256_sub_pd(y, t);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d up = _mm256_and_pd(_mm256_cmp_pd(d, _mm256_set1_pd(0.5), _CMP_GE_OQ), one);
  const __m256d down = _mm256_and_pd(_mm256_cmp_pd(d, _mm256_set1_pd(-0.5), _CMP_LE_OQ), one);
  return _mm256_sub_pd(_mm256_add_pd(t, up), down);
}

// Rounded, clamped, truncated to int32 (exact: values are already integral).
inline __m128i to_int32(__m256d y) {
  __m256d r = round_half_away(y);
  r = _mm256_max_pd(r, _mm256_set1_pd(kInt16Min));
  r = _mm256_min_pd(r, _mm256_set1_pd(kInt16Max));
  return _mm256_cvttpd_epi32(r);
}

inline __m256d sin_cycles4(__m256d cycles) {
  __m256d r = _mm256_sub_pd(cycles, _mm256_round_pd(cycles, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC));
  const __m256d quarter = _mm256_set1_pd(0.25);
  const __m256d half = _mm256_set1_pd(0.5);
  r = _mm256_blendv_pd(r, _mm256_sub_pd(half, r), _mm256_cmp_pd(r, quarter, _CMP_GT_OQ));
  const __m256d neg_half = _mm256_set1_pd(-0.5);
  const __m256d neg_quarter = _mm256_set1_pd(-0.25);
  r = _mm256_blendv_pd(r, _mm256_sub_pd(neg_half, r), _mm256_cmp_pd(r, neg_quarter, _CMP_LT_OQ));
  const __m256d t = _mm256_mul_pd(r, _mm256_set1_pd(kTwoPi));
  const __m256d z = _mm256_mul_pd(t, t);
  __m256d p = _mm256_set1_pd(kSinCoeff[10]);
  for (int k = 9; k >= 0; --k) p = _mm256_add_pd(_mm256_mul_pd(p, z), _mm256_set1_pd(kSinCoeff[k]));
  return _mm256_mul_pd(t, p);
}

void sine_fill_avx2(std::span<std::int16_t> out, const SineSpec& spec, std::size_t first_index) {
  const __m256d freq = _mm256_set1_pd(spec.frequency_hz);
  const __m256d rate = _mm256_set1_pd(spec.sample_rate);
  const __m256d amp = _mm256_set1_pd(spec.amplitude);
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d base_lo = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(first_index + i)), lane);
    const __m256d base_hi = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(first_index + i + 4)), lane);
    const __m256d c_lo = _mm256_div_pd(_mm256_mul_pd(base_lo, freq), rate);
    const __m256d c_hi = _mm256_div_pd(_mm256_mul_pd(base_hi, freq), rate);
    const __m128i lo = to_int32(_mm256_mul_pd(amp, sin_cycles4(c_lo)));
    const __m128i hi = to_int32(_mm256_mul_pd(amp, sin_cycles4(c_hi)));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out.data() + i), _mm_packs_epi32(lo, hi));
  }
  if (i < n) scalar_table().sine_fill(out.subspan(i), spec, first_index + i);
}

void apply_gain_avx2(std::span<std::int16_t> samples, std::span<const double> gains) {
  const std::size_t n = std::min(samples.size(), gains.size());
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i s16 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(samples.data() + i));
    const __m256d s_lo = _mm256_cvtepi32_pd(_mm_cvtepi16_epi32(s16));
    const __m256d s_hi = _mm256_cvtepi32_pd(_mm_cvtepi16_epi32(_mm_srli_si128(s16, 8)));
    const __m256d g_lo = _mm256_loadu_pd(gains.data() + i);
    const __m256d g_hi = _mm256_loadu_pd(gains.data() + i + 4);
    const __m128i lo = to_int32(_mm256_mul_pd(g_lo, s_lo));
    const __m128i hi = to_int32(_mm256_mul_pd(g_hi, s_hi));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(samples.data() + i), _mm_packs_epi32(lo, hi));
  }
  if (i < n) scalar_table().apply_gain(samples.subspan(i, n - i), gains.subspan(i, n - i));
}

SampleStats stats_avx2(std::span<const std::int16_t> samples) {
  const std::size_t n = samples.size();
  __m256i sum = _mm256_setzero_si256();
  __m256i sumsq = _mm256_setzero_si256();
  __m256i peak = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i s16 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(samples.data() + i));
    const __m256i s32 = _mm256_cvtepi16_epi32(s16);
    peak = _mm256_max_epi32(peak, _mm256_abs_epi32(s32));
    sum = _mm256_add_epi64(sum, _mm256_cvtepi32_epi64(_mm256_castsi256_si128(s32)));
    sum = _mm256_add_epi64(sum, _mm256_cvtepi32_epi64(_mm256_extracti128_si256(s32, 1)));
    const __m256i sq = _mm256_mullo_epi32(s32, s32);  // <= 2^30, fits
    sumsq = _mm256_add_epi64(sumsq, _mm256_cvtepu32_epi64(_mm256_castsi256_si128(sq)));
    sumsq = _mm256_add_epi64(sumsq, _mm256_cvtepu32_epi64(_mm256_extracti128_si256(sq, 1)));
  }

  alignas(32) std::int64_t sum_lanes[4];
  alignas(32) std::int64_t sq_lanes[4];
  alignas(32) std::int32_t peak_lanes[8];
  _mm256_store_si256(reinterpret_cast<__m256i*>(sum_lanes), sum);
  _mm256_store_si256(reinterpret_cast<__m256i*>(sq_lanes), sumsq);
  _mm256_store_si256(reinterpret_cast<__m256i*>(peak_lanes), peak);

  SampleStats s = scalar_table().stats(samples.subspan(i));
  for (int k = 0; k < 4; ++k) {
    s.sum += sum_lanes[k];
    s.sum_squares += sq_lanes[k];
  }
  for (int k = 0; k < 8; ++k) s.peak_abs = std::max(s.peak_abs, peak_lanes[k]);
  return s;
}

}  // namespace

namespace detail {
const KernelTable& avx2_table_unchecked() noexcept {
  static const KernelTable table{"avx2", &sine_fill_avx2, &apply_gain_avx2, &stats_avx2};
  return table;
}
}  // namespace detail

}  // namespace hapticaffect::kernels
