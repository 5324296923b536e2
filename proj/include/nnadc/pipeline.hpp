#pragma once

// K-stage pipelined ADC built from 4-bit neural cores. Every stage but the
// last carries a DAC; its residue, clipped to [0, V_FS/16], is held and
// amplified x16 by the next sub-ADC's input resistance.

#include "nnadc/network.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace nnadc {

struct PipelineStage {
  SubAdc4 adc;
  std::optional<Dac4> dac;
};

struct ConversionStats {
  std::uint64_t overrange = 0;
};

class PipelineAdc {
 public:
  PipelineAdc() = default;
  /// Ideal-weight pipeline of `n_stages` 4-bit stages.
  PipelineAdc(int n_stages, double v_fs, double f_s, Backend backend = Backend::Ideal,
              const MemristorParams& device = {});

  std::vector<PipelineStage> stages;
  double v_fs = 1.8;
  double f_s = 1e5;
  double inter_stage_gain = 16.0;

  int n_stages() const { return static_cast<int>(stages.size()); }
  int n_bits() const { return kStageBits * n_stages(); }
  std::uint32_t max_code() const { return (1u << n_bits()) - 1u; }
  double lsb() const;
  /// Clock cycles between sampling an input and emitting its code.
  int latency() const { return n_stages(); }

  /// 10 per sub-ADC plus 4 per DAC.
  int trainable_synapses() const;

  /// Timing-free conversion; inputs outside [0, V_FS] are clamped.
  std::uint32_t convert_static(double v_in, ConversionStats* stats = nullptr,
                               std::mt19937_64* noise = nullptr) const;

  /// convert_static over a batch through the SIMD kernels. Falls back to the
  /// per-sample path when comparator noise is enabled.
  void convert_batch(std::span<const double> v_in, std::span<std::uint32_t> codes,
                     ConversionStats* stats = nullptr, std::mt19937_64* noise = nullptr) const;

  std::vector<std::uint32_t> convert_all(std::span<const double> v_in,
                                         ConversionStats* stats = nullptr) const;
};

/// Clamps a residue to [0, V_FS/16]; counts clipped values in `stats`.
double residue_clip(double q, double v_fs, ConversionStats* stats = nullptr);

/// Sample/hold and D-flipflop state of a running pipeline.
struct ClockedFrame {
  struct Slot {
    double held = 0.0;            // value latched at this stage's input
    std::uint32_t partial = 0;    // code bits already resolved upstream
  };
  std::vector<std::optional<Slot>> stage_registers;
  std::uint64_t cycle_index = 0;
  ConversionStats stats;

  double held_input() const;
};

ClockedFrame make_frame(const PipelineAdc& p);

/// Advances the pipeline by one clock with a new input sample. The code of the
/// sample taken at cycle t comes out of the call at cycle t + latency().
std::optional<std::uint32_t> step(const PipelineAdc& p, ClockedFrame& frame, double sample);

/// Streams `samples` through step(); returns max(0, n - latency) codes.
std::vector<std::uint32_t> run(const PipelineAdc& p, std::span<const double> samples,
                               ConversionStats* stats = nullptr);

} // namespace nnadc
