// Compiled with -mavx2 only; never called unless the dispatcher saw AVX2.

#include "nnadc/simd.hpp"

#include <immintrin.h>

namespace nnadc::simd::avx2 {

namespace {
constexpr std::size_t kLanes = 4;
}

void subadc_convert_batch(const SubAdcWeights& w, std::span<const double> v_in,
                          std::span<std::uint8_t> codes) {
  const std::size_t n = v_in.size();
  const std::size_t rounds = n / kLanes;
  const __m256d gain = _mm256_set1_pd(w.input_gain);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d neg_tie = _mm256_set1_pd(-kTieBand);

  for (std::size_t r = 0; r < rounds; ++r) {
    const __m256d drive = _mm256_mul_pd(gain, _mm256_loadu_pd(v_in.data() + r * kLanes));
    __m256d bit[4] = {zero, zero, zero, zero};
    int code_mask[4] = {0, 0, 0, 0};
    for (int i = 3; i >= 0; --i) {
      __m256d pre = _mm256_sub_pd(drive, _mm256_set1_pd(w.bias[i]));
      for (int j = 3; j > i; --j)
        pre = _mm256_sub_pd(pre, _mm256_mul_pd(_mm256_set1_pd(w.feedback[i][j]), bit[j]));
      const __m256d fired = _mm256_cmp_pd(pre, neg_tie, _CMP_GE_OQ);
      bit[i] = _mm256_and_pd(fired, one);
      code_mask[i] = _mm256_movemask_pd(fired);
    }
    for (std::size_t lane = 0; lane < kLanes; ++lane) {
      std::uint8_t code = 0;
      for (int i = 0; i < 4; ++i)
        if ((code_mask[i] >> lane) & 1) code = static_cast<std::uint8_t>(code | (1u << i));
      codes[r * kLanes + lane] = code;
    }
  }
  const std::size_t done = rounds * kLanes;
  scalar::subadc_convert_batch(w, v_in.subspan(done), codes.subspan(done));
}

std::size_t dac_residue_batch(const double dac_step[4], std::span<const double> v_in,
                              std::span<const std::uint8_t> codes, double clip_hi,
                              std::span<double> residue) {
  const std::size_t n = v_in.size();
  const std::size_t rounds = n / kLanes;
  const __m256d zero = _mm256_setzero_pd();
  const __m256d hi = _mm256_set1_pd(clip_hi);
  const __m256d neg_tie = _mm256_set1_pd(-kTieBand);
  const __m256d hi_tie = _mm256_set1_pd(clip_hi + kTieBand);
  std::size_t clipped = 0;

  for (std::size_t r = 0; r < rounds; ++r) {
    const std::uint8_t* c = codes.data() + r * kLanes;
    __m256d a = zero;
    for (int i = 0; i < 4; ++i) {
      const __m256d bit = _mm256_set_pd(static_cast<double>((c[3] >> i) & 1u),
                                        static_cast<double>((c[2] >> i) & 1u),
                                        static_cast<double>((c[1] >> i) & 1u),
                                        static_cast<double>((c[0] >> i) & 1u));
      a = _mm256_add_pd(a, _mm256_mul_pd(_mm256_set1_pd(dac_step[i]), bit));
    }
    const __m256d q = _mm256_sub_pd(_mm256_loadu_pd(v_in.data() + r * kLanes), a);
    const __m256d out = _mm256_or_pd(_mm256_cmp_pd(q, neg_tie, _CMP_LT_OQ),
                                     _mm256_cmp_pd(q, hi_tie, _CMP_GT_OQ));
    clipped += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(out)));
    // max(0, q) keeps q when both are zeros, matching std::clamp on -0.0.
    _mm256_storeu_pd(residue.data() + r * kLanes, _mm256_min_pd(_mm256_max_pd(zero, q), hi));
  }
  const std::size_t done = rounds * kLanes;
  return clipped + scalar::dac_residue_batch(dac_step, v_in.subspan(done), codes.subspan(done),
                                             clip_hi, residue.subspan(done));
}

void euler_clip_batch(std::span<double> w, std::span<const double> rate, double dt,
                      std::size_t steps) {
  const std::size_t n = w.size();
  const std::size_t rounds = n / kLanes;
  const __m256d step = _mm256_set1_pd(dt);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);

  for (std::size_t r = 0; r < rounds; ++r) {
    __m256d x = _mm256_loadu_pd(w.data() + r * kLanes);
    const __m256d drift = _mm256_mul_pd(step, _mm256_loadu_pd(rate.data() + r * kLanes));
    for (std::size_t s = 0; s < steps; ++s)
      x = _mm256_min_pd(_mm256_max_pd(zero, _mm256_add_pd(x, drift)), one);
    _mm256_storeu_pd(w.data() + r * kLanes, x);
  }
  const std::size_t done = rounds * kLanes;
  scalar::euler_clip_batch(w.subspan(done), rate.subspan(done), dt, steps);
}

} // namespace nnadc::simd::avx2
