#pragma once

// Reference computations written without the library, used to pin the
// expected values in the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// Reference device: thresholds, rates (1/s at unit thickness), resistances.
struct Vteam {
  double v_on = -0.3, v_off = 0.4;
  double k_on = -4.8, k_off = 2.8;
  double a_on = 3.0, a_off = 1.0;
  double r_on = 2e3, r_off = 100e3;
  double thickness = 1.0;
};

inline double dwdt(const Vteam& d, double v) {
  if (v > d.v_off) return d.k_off / d.thickness * std::pow(v / d.v_off - 1.0, d.a_off);
  if (v < d.v_on) return d.k_on / d.thickness * std::pow(v / d.v_on - 1.0, d.a_on);
  return 0.0;
}

// Fixed-step integration with clipping; the step is duration / steps.
inline double integrate(const Vteam& d, double w, double v, double duration, int steps) {
  const double h = duration / steps;
  for (int i = 0; i < steps; ++i) w = std::min(1.0, std::max(0.0, w + h * dwdt(d, v)));
  return w;
}

inline double ohm(const Vteam& d, double w) { return d.r_on + w * (d.r_off - d.r_on); }

// floor(v / lsb) clamped to the code range.
inline std::uint32_t floor_quantize(double v, double v_fs, int n_bits) {
  const double codes = std::ldexp(1.0, n_bits);
  const double c = std::floor(v / v_fs * codes);
  return static_cast<std::uint32_t>(std::clamp(c, 0.0, codes - 1.0));
}

// Ideal quantizer SNDR for a full-scale sine.
inline double ideal_sndr_db(int n_bits) { return 6.02 * n_bits + 1.76; }

// Rates r4, r8 of n*t + (n-1)*tau = 1/r solved by Cramer's rule.
inline void solve_rates(double r4, double r8, double& t, double& tau) {
  // | 4 3 | |t  |   |1/r4|
  // | 8 7 | |tau| = |1/r8|
  const double det = 4.0 * 7.0 - 3.0 * 8.0;
  t = (7.0 / r4 - 3.0 / r8) / det;
  tau = (4.0 / r8 - 8.0 / r4) / det;
}

// Gradient descent on the DAC quadratic loss over the 16-code ramp: each code
// sees e = sum_i u_i D_i v_fs/16 - code v_fs/16 and every set bit i moves by
// -eta * decay^epoch * 2^i / 8 * e.
inline void dac_descent(double u[4], int epochs, double eta, double decay, double v_fs) {
  for (int e = 0; e < epochs; ++e) {
    const double rate = eta * std::pow(decay, e);
    for (int code = 0; code < 16; ++code) {
      double out = 0.0;
      for (int i = 0; i < 4; ++i)
        if (code >> i & 1) out += u[i] * v_fs / 16;
      const double err = out - code * v_fs / 16;
      for (int i = 0; i < 4; ++i)
        if (code >> i & 1) u[i] -= rate * (1 << i) / 8.0 * err;
    }
  }
}

inline std::vector<double> random_uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

} // namespace oracle
