#include "nnadc/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nnadc {

std::array<int, 4> bits_msb_first(Nibble code) {
  return {bit_of(code, 3), bit_of(code, 2), bit_of(code, 1), bit_of(code, 0)};
}

Synapse Synapse::memristive(double gain, const MemristorParams& params, double r_f) {
  const auto [lo, hi] = gain_range(params, r_f);
  const double magnitude = std::clamp(std::abs(gain), lo, hi);
  const double r = r_f / magnitude;
  MemristiveGain m;
  m.device.w = std::clamp((r - params.r_on) / (params.r_off - params.r_on), 0.0, 1.0);
  m.sign = gain < 0.0 ? -1 : +1;
  m.r_f = r_f;
  return Synapse{m};
}

double synapse_gain(const Synapse& s, const MemristorParams& params) {
  if (const auto* ideal = std::get_if<IdealGain>(&s.backend)) return ideal->value;
  const auto& m = std::get<MemristiveGain>(s.backend);
  return m.sign * m.r_f / resistance(params, m.device);
}

std::pair<double, double> gain_range(const MemristorParams& params, double r_f) {
  return {r_f / params.r_off, r_f / params.r_on};
}

Synapse program_weight(const Synapse& s, const MemristorParams& params, double target_delta,
                       const WriteScheme& scheme, std::mt19937_64* noise) {
  if (!s.is_memristive())
    throw std::invalid_argument("program_weight: synapse has no memristive device");
  if (target_delta == 0.0) return s;

  Synapse out = s;
  auto& m = std::get<MemristiveGain>(out.backend);
  const double r = resistance(params, m.device);
  // d(gain)/dw; negative for sign = +1 since w grows toward HRS.
  const double slope = -m.sign * m.r_f * (params.r_off - params.r_on) / (r * r);
  const double dw = target_delta / slope;
  const double amplitude = dw > 0.0 ? scheme.voltage : -scheme.voltage;
  const double rate = std::abs(state_derivative(params, amplitude));

  double duration = scheme.max_time;
  if (rate > 0.0) duration = std::min(std::abs(dw) / rate, scheme.max_time);
  if (!(duration > 0.0)) return s;

  m.device = apply_pulse(params, m.device, PulseSpec{amplitude, duration},
                         duration / scheme.euler_steps, noise);
  return out;
}

SubAdc4::SubAdc4(double v_fs_, double input_gain_, Backend backend_kind,
                 const MemristorParams& device_)
    : input_gain(input_gain_), v_fs(v_fs_), device(device_) {
  auto make = [&](double gain) {
    return backend_kind == Backend::Ideal ? Synapse::ideal(gain)
                                          : Synapse::memristive(gain, device);
  };
  for (int i = 0; i < 4; ++i) {
    bias[i] = make(std::ldexp(1.0, i));
    for (int j = 0; j < 4; ++j) feedback[i][j] = make(j > i ? std::ldexp(1.0, j) : 0.0);
  }
}

Backend SubAdc4::backend() const {
  return bias[0].is_memristive() ? Backend::Memristive : Backend::Ideal;
}

double SubAdc4::bias_volts(int i) const { return synapse_gain(bias[i], device) * v_ref(); }

double SubAdc4::feedback_volts(int i, int j) const {
  return synapse_gain(feedback[i][j], device) * v_ref();
}

simd::SubAdcWeights SubAdc4::kernel_weights() const {
  simd::SubAdcWeights w{};
  w.input_gain = input_gain;
  for (int i = 0; i < 4; ++i) {
    w.bias[i] = bias_volts(i);
    for (int j = 0; j < 4; ++j) w.feedback[i][j] = j > i ? feedback_volts(i, j) : 0.0;
  }
  return w;
}

double SubAdc4::pre_activation(int i, double v_in, Nibble upstream) const {
  // Same operation order as the batch kernels so both paths round identically.
  double pre = input_gain * v_in - bias_volts(i);
  for (int j = 3; j > i; --j)
    pre = pre - feedback_volts(i, j) * static_cast<double>(bit_of(upstream, j));
  return pre;
}

Nibble SubAdc4::convert(double v_in, const Nibble* forced, std::mt19937_64* noise) const {
  const simd::SubAdcWeights w = kernel_weights();
  const double drive = w.input_gain * v_in;
  const bool noisy = comparator_noise_sigma > 0.0 && noise != nullptr;
  std::normal_distribution<double> gauss(0.0, noisy ? comparator_noise_sigma : 1.0);

  Nibble code = 0;
  for (int i = 3; i >= 0; --i) {
    const Nibble upstream = forced != nullptr ? *forced : code;
    double pre = drive - w.bias[i];
    for (int j = 3; j > i; --j)
      pre = pre - w.feedback[i][j] * static_cast<double>(bit_of(upstream, j));
    if (noisy) pre += gauss(*noise);
    if (neuron_activation(pre)) code = static_cast<Nibble>(code | (1u << i));
  }
  return code;
}

Dac4::Dac4(double v_fs_, Backend backend_kind, const MemristorParams& device_)
    : v_fs(v_fs_), device(device_) {
  for (int i = 0; i < 4; ++i) {
    const double gain = std::ldexp(1.0, i);
    weights[i] = backend_kind == Backend::Ideal ? Synapse::ideal(gain)
                                                : Synapse::memristive(gain, device);
  }
}

void Dac4::steps(double out[4]) const {
  for (int i = 0; i < 4; ++i) out[i] = step(i);
}

double Dac4::convert(Nibble code) const {
  double a = 0.0;
  for (int i = 0; i < 4; ++i) a = a + step(i) * static_cast<double>(bit_of(code, i));
  return a;
}

} // namespace nnadc
