#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and an AVX2
// variant; the dispatcher picks one at runtime. Variants are required to be
// bit-identical (the build disables FP contraction), which the equivalence
// tests check.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace nnadc::simd {

/// Pre-activations and residues within this many volts of a decision edge
/// are rounding noise; they resolve as if they sat exactly on it.
inline constexpr double kTieBand = 1e-12;

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best ISA supported by this CPU and build.
Isa detected_isa();

/// ISA currently used by the dispatcher. Starts as detected_isa(), unless the
/// NNADC_SIMD environment variable names another supported one.
Isa active_isa();

/// Overrides the dispatcher (tests, benchmarks). Requests for an unsupported
/// ISA fall back to scalar. Returns the ISA actually selected.
Isa force_isa(Isa isa);

/// Weights of one 4-bit sub-ADC flattened for the batch kernels.
/// pre_i = gain*v - bias[i] - sum_{j=3..i+1} feedback[i][j]*D_j
struct SubAdcWeights {
  double bias[4];
  double feedback[4][4];
  double input_gain;
};

/// Converts every input to a 4-bit code (bit i = D_i), u(0) = 1.
void subadc_convert_batch(const SubAdcWeights& w, std::span<const double> v_in,
                          std::span<std::uint8_t> codes);

/// residue = v_in - sum_i dac_step[i]*D_i (summed i = 0..3), clipped to
/// [0, clip_hi]. Returns the number of clipped samples.
std::size_t dac_residue_batch(const double dac_step[4], std::span<const double> v_in,
                              std::span<const std::uint8_t> codes, double clip_hi,
                              std::span<double> residue);

/// `steps` explicit Euler steps of w += dt*rate, clipped to [0, 1] each step.
void euler_clip_batch(std::span<double> w, std::span<const double> rate, double dt,
                      std::size_t steps);

namespace scalar {
void subadc_convert_batch(const SubAdcWeights& w, std::span<const double> v_in,
                          std::span<std::uint8_t> codes);
std::size_t dac_residue_batch(const double dac_step[4], std::span<const double> v_in,
                              std::span<const std::uint8_t> codes, double clip_hi,
                              std::span<double> residue);
void euler_clip_batch(std::span<double> w, std::span<const double> rate, double dt,
                      std::size_t steps);
} // namespace scalar

#if defined(NNADC_HAVE_AVX2)
namespace avx2 {
void subadc_convert_batch(const SubAdcWeights& w, std::span<const double> v_in,
                          std::span<std::uint8_t> codes);
std::size_t dac_residue_batch(const double dac_step[4], std::span<const double> v_in,
                              std::span<const std::uint8_t> codes, double clip_hi,
                              std::span<double> residue);
void euler_clip_batch(std::span<double> w, std::span<const double> rate, double dt,
                      std::size_t steps);
} // namespace avx2
#endif

} // namespace nnadc::simd
