#pragma once

// Voltage-controlled threshold memristor (VTEAM kinetics) with a normalized
// internal state, fixed-step pulse programming and write-cycle accounting.

#include <cstdint>
#include <random>
#include <span>

namespace nnadc {

struct MemristorParams {
  double v_on = -0.3;   // V, negative switching threshold
  double v_off = 0.4;   // V, positive switching threshold
  double k_on = -4.8;   // um/s
  double k_off = 2.8;   // um/s
  double alpha_on = 3.0;
  double alpha_off = 1.0;
  double r_on = 2e3;    // ohm (LRS)
  double r_off = 100e3; // ohm (HRS)
  // State-variable thickness. k_on/k_off divided by this give the rates of the
  // normalized state w in 1/s.
  double thickness_um = 1.0;
  // Relative sigma of a Gaussian multiplier applied to every pulse's dw.
  double write_noise_sigma = 0.0;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  double k_on_rate() const { return k_on / thickness_um; }
  double k_off_rate() const { return k_off / thickness_um; }
  double hrs_lrs_ratio() const { return r_off / r_on; }
};

/// w = 0 is the LRS end (r_on), w = 1 the HRS end (r_off).
struct MemristorState {
  double w = 0.5;
  std::uint64_t write_cycles = 0;
};

struct PulseSpec {
  double amplitude = 0.0; // V
  double duration = 0.0;  // s
};

inline constexpr PulseSpec kWritePulsePositive{0.5, 5e-6};
inline constexpr PulseSpec kWritePulseNegative{-0.5, 5e-6};
inline constexpr PulseSpec kReadPulse{-0.1125, 5e-6};
inline constexpr double kDefaultEndurance = 8e7;

/// dw/dt in 1/s. Zero inside the dead zone [v_on, v_off].
double state_derivative(const MemristorParams& params, double v);

/// True when the amplitude crosses either switching threshold.
bool is_write_amplitude(const MemristorParams& params, double amplitude);

/// Explicit Euler over the pulse with step dt (the last step is shortened to
/// land exactly on pulse.duration); w is clipped to [0, 1] after every step.
/// `noise` is only consulted when params.write_noise_sigma > 0.
MemristorState apply_pulse(const MemristorParams& params, MemristorState state,
                           const PulseSpec& pulse, double dt,
                           std::mt19937_64* noise = nullptr);

/// apply_pulse with the default step of pulse.duration / 100.
MemristorState apply_pulse(const MemristorParams& params, MemristorState state,
                           const PulseSpec& pulse,
                           std::mt19937_64* noise = nullptr);

/// Programs a population of devices with equal-duration pulses (one amplitude
/// per device) through the SIMD Euler kernel. Matches apply_pulse per device;
/// write noise is not applied.
void apply_pulse_batch(const MemristorParams& params, std::span<MemristorState> states,
                       std::span<const double> amplitudes, double duration, double dt);

double resistance(const MemristorParams& params, const MemristorState& state);

/// Ohmic read. Rejects amplitudes that would program the device.
double read_current(const MemristorParams& params, const MemristorState& state,
                    double v_r);

} // namespace nnadc
