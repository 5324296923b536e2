#include "nnadc/device.hpp"

#include "nnadc/simd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace nnadc {

void MemristorParams::validate() const {
  if (!(v_on < 0.0 && v_off > 0.0))
    throw std::invalid_argument("memristor: require v_on < 0 < v_off");
  if (!(r_on > 0.0 && r_on < r_off))
    throw std::invalid_argument("memristor: require 0 < r_on < r_off");
  if (!(k_on < 0.0 && k_off > 0.0))
    throw std::invalid_argument("memristor: require k_on < 0 < k_off");
  if (!(alpha_on >= 1.0 && alpha_off >= 1.0))
    throw std::invalid_argument("memristor: alpha_on and alpha_off must be >= 1");
  if (!(thickness_um > 0.0))
    throw std::invalid_argument("memristor: thickness_um must be positive");
  if (!(write_noise_sigma >= 0.0))
    throw std::invalid_argument("memristor: write_noise_sigma must be >= 0");
}

double state_derivative(const MemristorParams& p, double v) {
  if (v > p.v_off) return p.k_off_rate() * std::pow(v / p.v_off - 1.0, p.alpha_off);
  if (v < p.v_on) return p.k_on_rate() * std::pow(v / p.v_on - 1.0, p.alpha_on);
  return 0.0;
}

bool is_write_amplitude(const MemristorParams& p, double amplitude) {
  return amplitude > p.v_off || amplitude < p.v_on;
}

MemristorState apply_pulse(const MemristorParams& p, MemristorState s,
                           const PulseSpec& pulse, double dt,
                           std::mt19937_64* noise) {
  if (!(pulse.duration > 0.0))
    throw std::invalid_argument("apply_pulse: pulse duration must be positive");
  if (!(dt > 0.0) || dt > pulse.duration * (1.0 + 1e-12))
    throw std::invalid_argument("apply_pulse: need 0 < dt <= pulse duration");

  if (!is_write_amplitude(p, pulse.amplitude)) return s;
  ++s.write_cycles;

  const double rate = state_derivative(p, pulse.amplitude);
  double scale = 1.0;
  if (p.write_noise_sigma > 0.0 && noise != nullptr) {
    std::normal_distribution<double> gauss(0.0, p.write_noise_sigma);
    scale = std::max(0.0, 1.0 + gauss(*noise));
  }
  const double drift = rate * scale;

  const auto full_steps = static_cast<std::uint64_t>(std::floor(pulse.duration / dt + 1e-9));
  const double tail = pulse.duration - static_cast<double>(full_steps) * dt;
  double w = s.w;
  for (std::uint64_t i = 0; i < full_steps; ++i)
    w = std::clamp(w + dt * drift, 0.0, 1.0);
  if (tail > pulse.duration * 1e-9) w = std::clamp(w + tail * drift, 0.0, 1.0);
  s.w = w;
  return s;
}

MemristorState apply_pulse(const MemristorParams& p, MemristorState s,
                           const PulseSpec& pulse, std::mt19937_64* noise) {
  return apply_pulse(p, s, pulse, pulse.duration / 100.0, noise);
}

void apply_pulse_batch(const MemristorParams& p, std::span<MemristorState> states,
                       std::span<const double> amplitudes, double duration, double dt) {
  if (states.size() != amplitudes.size())
    throw std::invalid_argument("apply_pulse_batch: size mismatch");
  if (!(duration > 0.0) || !(dt > 0.0) || dt > duration * (1.0 + 1e-12))
    throw std::invalid_argument("apply_pulse_batch: need 0 < dt <= duration");

  std::vector<double> w(states.size());
  std::vector<double> rate(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    w[i] = states[i].w;
    if (is_write_amplitude(p, amplitudes[i])) {
      rate[i] = state_derivative(p, amplitudes[i]);
      ++states[i].write_cycles;
    }
  }
  const auto full_steps = static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
  const double tail = duration - static_cast<double>(full_steps) * dt;
  simd::euler_clip_batch(w, rate, dt, full_steps);
  if (tail > duration * 1e-9) simd::euler_clip_batch(w, rate, tail, 1);
  for (std::size_t i = 0; i < states.size(); ++i) states[i].w = w[i];
}

double resistance(const MemristorParams& p, const MemristorState& s) {
  return p.r_on + s.w * (p.r_off - p.r_on);
}

double read_current(const MemristorParams& p, const MemristorState& s, double v_r) {
  if (!(std::abs(v_r) < std::min(std::abs(p.v_on), p.v_off)))
    throw std::invalid_argument("read_current: amplitude " + std::to_string(v_r) +
                                " V would program the device");
  return v_r / resistance(p, s);
}

} // namespace nnadc
