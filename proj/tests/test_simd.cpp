#include "nnadc/pipeline.hpp"
#include "nnadc/simd.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nnadc;

namespace {

simd::SubAdcWeights random_weights(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> g(0.0, 2.0);
  simd::SubAdcWeights w{};
  for (int i = 0; i < 4; ++i) {
    w.bias[i] = g(rng) * 0.1125 * (1 << i);
    for (int j = 0; j < 4; ++j) w.feedback[i][j] = j > i ? g(rng) * 0.1125 * (1 << j) : 0.0;
  }
  w.input_gain = 16.0 * g(rng);
  return w;
}

// Sizes straddling the 4-wide vector tail.
const std::size_t kSizes[] = {0, 1, 3, 4, 5, 7, 8, 13, 1024, 1027};

} // namespace

#if defined(NNADC_HAVE_AVX2)

TEST(SimdEquivalence, SubAdcConvert) {
  if (simd::detected_isa() != simd::Isa::Avx2) GTEST_SKIP() << "no AVX2 on this CPU";
  std::mt19937_64 rng(11);
  for (std::size_t n : kSizes) {
    const auto w = random_weights(rng);
    auto v = oracle::random_uniform(n, -0.1, 1.9, n + 1);
    // Exact decision edges of the ideal core.
    for (std::size_t k = 0; k < n && k < 16; ++k) v[k] = 0.1125 * static_cast<double>(k);
    std::vector<std::uint8_t> a(n), b(n);
    simd::scalar::subadc_convert_batch(w, v, a);
    simd::avx2::subadc_convert_batch(w, v, b);
    EXPECT_EQ(a, b) << "n=" << n;
  }
}

TEST(SimdEquivalence, DacResidue) {
  if (simd::detected_isa() != simd::Isa::Avx2) GTEST_SKIP() << "no AVX2 on this CPU";
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> code(0, 15);
  for (std::size_t n : kSizes) {
    const double steps[4] = {0.1125, 0.225, 0.45, 0.9 + 1e-3};
    const auto v = oracle::random_uniform(n, 0.0, 1.8, n + 2);
    std::vector<std::uint8_t> c(n);
    for (auto& x : c) x = static_cast<std::uint8_t>(code(rng));
    std::vector<double> ra(n), rb(n);
    const auto ca = simd::scalar::dac_residue_batch(steps, v, c, 0.1125, ra);
    const auto cb = simd::avx2::dac_residue_batch(steps, v, c, 0.1125, rb);
    EXPECT_EQ(ca, cb) << "n=" << n;
    for (std::size_t k = 0; k < n; ++k) ASSERT_EQ(ra[k], rb[k]) << "n=" << n << " k=" << k;
  }
}

TEST(SimdEquivalence, EulerClip) {
  if (simd::detected_isa() != simd::Isa::Avx2) GTEST_SKIP() << "no AVX2 on this CPU";
  for (std::size_t n : kSizes) {
    auto wa = oracle::random_uniform(n, 0.0, 1.0, n + 3);
    const auto rate = oracle::random_uniform(n, -3e4, 3e4, n + 4);
    auto wb = wa;
    simd::scalar::euler_clip_batch(wa, rate, 5e-8, 100);
    simd::avx2::euler_clip_batch(wb, rate, 5e-8, 100);
    for (std::size_t k = 0; k < n; ++k) ASSERT_EQ(wa[k], wb[k]) << "n=" << n << " k=" << k;
  }
}

TEST(SimdEquivalence, PipelineThroughDispatcher) {
  if (simd::detected_isa() != simd::Isa::Avx2) GTEST_SKIP() << "no AVX2 on this CPU";
  PipelineAdc p(3, 1.8, 1e5);
  const auto v = oracle::random_uniform(5001, -0.05, 1.85, 5);
  ConversionStats sa, sb;
  simd::force_isa(simd::Isa::Scalar);
  const auto a = p.convert_all(v, &sa);
  simd::force_isa(simd::Isa::Avx2);
  const auto b = p.convert_all(v, &sb);
  simd::force_isa(simd::detected_isa());
  EXPECT_EQ(a, b);
  EXPECT_EQ(sa.overrange, sb.overrange);
}

#endif

TEST(SimdDispatch, ForceScalarAlwaysHonoured) {
  EXPECT_EQ(simd::force_isa(simd::Isa::Scalar), simd::Isa::Scalar);
  EXPECT_EQ(simd::active_isa(), simd::Isa::Scalar);
  simd::force_isa(simd::detected_isa());
  EXPECT_EQ(simd::active_isa(), simd::detected_isa());
  EXPECT_EQ(simd::isa_name(simd::Isa::Scalar), "scalar");
}

TEST(SimdDispatch, BatchMatchesPerSamplePath) {
  PipelineAdc p(2, 1.8, 1e5);
  const auto v = oracle::random_uniform(3001, 0.0, 1.8, 9);
  for (auto isa : {simd::Isa::Scalar, simd::detected_isa()}) {
    simd::force_isa(isa);
    const auto batch = p.convert_all(v);
    for (std::size_t k = 0; k < v.size(); ++k) ASSERT_EQ(batch[k], p.convert_static(v[k])) << k;
  }
  simd::force_isa(simd::detected_isa());
}
