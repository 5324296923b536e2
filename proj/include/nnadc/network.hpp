#pragma once

// Neural converter cores: signed synapses, signum neurons, the 4-bit sub-ADC
// and the 4-bit binary-weighted DAC.
//
// Every synapse stores a dimensionless gain. Sub-ADC weights are that gain
// times V_ref (V_FS/16), the level at which bias and bit lines drive the
// synapses; ideal gains are 2^i for the bias of neuron i and 2^j for the
// feedback from bit j. DAC weights are the gains u_i themselves, ideally 2^i.

#include "nnadc/device.hpp"
#include "nnadc/simd.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <variant>

namespace nnadc {

inline constexpr double kFeedbackResistor = 45e3; // ohm
inline constexpr int kStageBits = 4;
inline constexpr int kStageCodes = 16;

/// 4-bit code, bit i holds D_i (bit 3 is the MSB).
using Nibble = std::uint8_t;

constexpr int bit_of(Nibble code, int i) { return (code >> i) & 1; }

/// Bits ordered MSB first, D_3 D_2 D_1 D_0.
std::array<int, 4> bits_msb_first(Nibble code);

enum class Backend { Ideal, Memristive };

struct IdealGain {
  double value = 0.0;
};

/// Memristor between a pre-synaptic line and a neuron with feedback resistor
/// r_f; the enable transistors choosing u or -u collapse into `sign`.
struct MemristiveGain {
  MemristorState device;
  int sign = +1;
  double r_f = kFeedbackResistor;
};

struct Synapse {
  std::variant<IdealGain, MemristiveGain> backend;

  static Synapse ideal(double gain) { return Synapse{IdealGain{gain}}; }
  /// Memristive synapse whose device state realizes |gain| (clipped to the
  /// achievable range).
  static Synapse memristive(double gain, const MemristorParams& params,
                            double r_f = kFeedbackResistor);

  bool is_memristive() const { return std::holds_alternative<MemristiveGain>(backend); }
};

double synapse_gain(const Synapse& s, const MemristorParams& params);

/// Smallest and largest |gain| a memristive synapse can realize: r_f/r_off, r_f/r_on.
std::pair<double, double> gain_range(const MemristorParams& params,
                                     double r_f = kFeedbackResistor);

/// Write-pulse programming of a memristive synapse.
struct WriteScheme {
  double voltage = 0.5;   // V, magnitude of the write pulse
  double max_time = 5e-6; // s, T_w
  int euler_steps = 100;
};

/// Moves a memristive synapse's gain by approximately `target_delta` with one
/// write pulse. The pulse width is proportional to the requested change
/// (from the local slope of the gain) and capped at scheme.max_time.
/// Throws std::invalid_argument for an ideal synapse.
Synapse program_weight(const Synapse& s, const MemristorParams& params, double target_delta,
                       const WriteScheme& scheme = {}, std::mt19937_64* noise = nullptr);

/// u(x): 1 when x >= 0, with ties widened to the rounding band.
constexpr int neuron_activation(double x) { return x >= -simd::kTieBand ? 1 : 0; }

class SubAdc4 {
 public:
  SubAdc4() = default;
  /// Core with ideal gains on the given backend.
  SubAdc4(double v_fs, double input_gain, Backend backend = Backend::Ideal,
          const MemristorParams& device = {});

  std::array<Synapse, 4> bias;
  /// feedback[i][j] is used only for j > i.
  std::array<std::array<Synapse, 4>, 4> feedback;
  double input_gain = 1.0;
  double v_fs = 1.8;
  double comparator_noise_sigma = 0.0; // V, added to every pre-activation
  MemristorParams device;

  double v_ref() const { return v_fs / kStageCodes; }
  Backend backend() const;

  double bias_volts(int i) const;
  double feedback_volts(int i, int j) const;

  simd::SubAdcWeights kernel_weights() const;

  /// MSB-first conversion. With `forced`, bit j > i feeding neuron i is taken
  /// from `forced` rather than from the computed bit (teacher forcing).
  Nibble convert(double v_in, const Nibble* forced = nullptr,
                 std::mt19937_64* noise = nullptr) const;

  /// Pre-activation of neuron i given the upstream bits.
  double pre_activation(int i, double v_in, Nibble upstream) const;

  static constexpr int trainable_synapses() { return 10; }

  template <class F>
  void for_each_synapse(F&& f) {
    for (int i = 0; i < 4; ++i) f(bias[i]);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) f(feedback[i][j]);
  }
  template <class F>
  void for_each_synapse(F&& f) const {
    for (int i = 0; i < 4; ++i) f(bias[i]);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) f(feedback[i][j]);
  }
};

class Dac4 {
 public:
  Dac4() = default;
  explicit Dac4(double v_fs, Backend backend = Backend::Ideal,
                const MemristorParams& device = {});

  std::array<Synapse, 4> weights;
  double v_fs = 1.8;
  MemristorParams device;

  double gain(int i) const { return synapse_gain(weights[i], device); }
  /// Output volts contributed by bit i when set: u_i * V_FS / 16.
  double step(int i) const { return gain(i) * v_fs / kStageCodes; }
  void steps(double out[4]) const;

  /// A = (1/16) * sum_i u_i * D_i * V_FS
  double convert(Nibble code) const;

  static constexpr int trainable_synapses() { return 4; }
};

/// Q = v_in - a
constexpr double residue(double v_in, double a) { return v_in - a; }

} // namespace nnadc
