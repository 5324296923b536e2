#include "nnadc/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace nnadc::simd {

namespace {

bool cpu_has_avx2() {
#if defined(NNADC_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  const Isa best = detected_isa();
  if (const char* env = std::getenv("NNADC_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Isa::Scalar;
    if (want == "avx2" && best == Isa::Avx2) return Isa::Avx2;
  }
  return best;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

} // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

Isa detected_isa() {
  static const Isa isa = cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
  return isa;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa force_isa(Isa isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
  return isa;
}

void subadc_convert_batch(const SubAdcWeights& w, std::span<const double> v_in,
                          std::span<std::uint8_t> codes) {
#if defined(NNADC_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::subadc_convert_batch(w, v_in, codes);
#endif
  scalar::subadc_convert_batch(w, v_in, codes);
}

std::size_t dac_residue_batch(const double dac_step[4], std::span<const double> v_in,
                              std::span<const std::uint8_t> codes, double clip_hi,
                              std::span<double> residue) {
#if defined(NNADC_HAVE_AVX2)
  if (active_isa() == Isa::Avx2)
    return avx2::dac_residue_batch(dac_step, v_in, codes, clip_hi, residue);
#endif
  return scalar::dac_residue_batch(dac_step, v_in, codes, clip_hi, residue);
}

void euler_clip_batch(std::span<double> w, std::span<const double> rate, double dt,
                      std::size_t steps) {
#if defined(NNADC_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::euler_clip_batch(w, rate, dt, steps);
#endif
  scalar::euler_clip_batch(w, rate, dt, steps);
}

} // namespace nnadc::simd
