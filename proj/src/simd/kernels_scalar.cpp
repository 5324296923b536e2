#include "nnadc/simd.hpp"

#include <algorithm>

namespace nnadc::simd::scalar {

void subadc_convert_batch(const SubAdcWeights& w, std::span<const double> v_in,
                          std::span<std::uint8_t> codes) {
  for (std::size_t n = 0; n < v_in.size(); ++n) {
    const double drive = w.input_gain * v_in[n];
    double bit[4] = {0.0, 0.0, 0.0, 0.0};
    std::uint8_t code = 0;
    for (int i = 3; i >= 0; --i) {
      double pre = drive - w.bias[i];
      for (int j = 3; j > i; --j) pre = pre - w.feedback[i][j] * bit[j];
      if (pre >= -kTieBand) {
        bit[i] = 1.0;
        code = static_cast<std::uint8_t>(code | (1u << i));
      }
    }
    codes[n] = code;
  }
}

std::size_t dac_residue_batch(const double dac_step[4], std::span<const double> v_in,
                              std::span<const std::uint8_t> codes, double clip_hi,
                              std::span<double> residue) {
  std::size_t clipped = 0;
  for (std::size_t n = 0; n < v_in.size(); ++n) {
    double a = 0.0;
    for (int i = 0; i < 4; ++i) a = a + dac_step[i] * static_cast<double>((codes[n] >> i) & 1u);
    const double q = v_in[n] - a;
    if (q < -kTieBand || q > clip_hi + kTieBand) ++clipped;
    residue[n] = std::clamp(q, 0.0, clip_hi);
  }
  return clipped;
}

void euler_clip_batch(std::span<double> w, std::span<const double> rate, double dt,
                      std::size_t steps) {
  for (std::size_t n = 0; n < w.size(); ++n) {
    double x = w[n];
    const double r = rate[n];
    for (std::size_t s = 0; s < steps; ++s) x = std::clamp(x + dt * r, 0.0, 1.0);
    w[n] = x;
  }
}

} // namespace nnadc::simd::scalar
