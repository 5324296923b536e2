#include "nnadc/metrics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nnadc;

namespace {

std::vector<std::uint32_t> floor_codes(std::span<const double> v, double v_fs, int n_bits) {
  std::vector<std::uint32_t> c;
  c.reserve(v.size());
  for (double x : v) c.push_back(oracle::floor_quantize(x, v_fs, n_bits));
  return c;
}

} // namespace

TEST(Linearity, IdealQuantizerIsPerfect) {
  const auto ramp = linearity_ramp(default_ramp_points(8), 1.8);
  ASSERT_EQ(ramp.size(), 18432u);
  const auto r = dnl_inl(floor_codes(ramp, 1.8, 8), 8);
  EXPECT_EQ(r.max_abs_dnl, 0.0);
  EXPECT_EQ(r.max_abs_inl, 0.0);
  EXPECT_TRUE(r.missing_codes.empty());
  EXPECT_EQ(r.dnl.size(), 254u);
}

TEST(Linearity, HalfLsbShiftedTransition) {
  // 100 hits per code; moving the transition into code 40 up by half an LSB
  // hands 50 hits from code 40 to code 39.
  std::vector<std::uint32_t> codes;
  for (std::uint32_t c = 0; c < 256; ++c) {
    int hits = 100;
    if (c == 39) hits = 150;
    if (c == 40) hits = 50;
    codes.insert(codes.end(), static_cast<std::size_t>(hits), c);
  }
  const auto r = dnl_inl(codes, 8);
  EXPECT_NEAR(r.dnl[39 - 1], 0.5, 1e-12);
  EXPECT_NEAR(r.dnl[40 - 1], -0.5, 1e-12);
  EXPECT_NEAR(r.max_abs_dnl, 0.5, 1e-12);
  EXPECT_NEAR(r.max_abs_inl, 0.5, 1e-12);
  EXPECT_NEAR(r.inl[39 - 1], 0.5, 1e-12);
  EXPECT_NEAR(r.inl[40 - 1], 0.0, 1e-12);
}

TEST(Linearity, MissingCodeAndErrors) {
  std::vector<std::uint32_t> codes;
  for (std::uint32_t c = 0; c < 16; ++c)
    if (c != 7) codes.insert(codes.end(), 4, c);
  const auto r = dnl_inl(codes, 4);
  ASSERT_EQ(r.missing_codes.size(), 1u);
  EXPECT_EQ(r.missing_codes[0], 7u);
  EXPECT_EQ(r.dnl[6], -1.0);
  EXPECT_THROW(dnl_inl(std::vector<std::uint32_t>(8, 0), 4), std::invalid_argument);
  EXPECT_THROW(dnl_inl(std::vector<std::uint32_t>(16, 16), 4), std::invalid_argument);
}

TEST(Linearity, RampPointsScaleWithWidth) {
  EXPECT_EQ(default_ramp_points(8), 18432u);
  EXPECT_EQ(default_ramp_points(12), 73728u);
  const auto r = linearity_ramp(4, 1.0);
  EXPECT_DOUBLE_EQ(r[0], 0.125);
  EXPECT_DOUBLE_EQ(r[3], 0.875);
}

TEST(Spectrum, CoherentBinSelection) {
  EXPECT_EQ(coherent_bin(44e3, 1e5, 2048), 901u);
  EXPECT_NEAR(bin_frequency(901, 1e5, 2048), 43994.140625, 1e-9);
  EXPECT_EQ(coherent_bin(44e3, 1e5, 8192) % 2, 1u);
  EXPECT_THROW(coherent_bin(60e3, 1e5, 2048), std::invalid_argument);
}

TEST(Spectrum, ParsevalHolds) {
  const auto x = sine_record(2048, 901, 1.8, 0.7);
  auto noisy = x;
  const auto n = oracle::random_uniform(x.size(), -0.01, 0.01, 3);
  for (std::size_t k = 0; k < x.size(); ++k) noisy[k] += n[k];
  const auto r = spectrum(noisy, 1e5, bin_frequency(901, 1e5, 2048), 1.0);
  double bins = r.nyquist_bin * r.nyquist_bin;
  for (double m : r.fft_bins) bins += m * m;
  double ms = 0.0;
  for (double v : noisy) ms += v * v;
  ms /= static_cast<double>(noisy.size());
  EXPECT_NEAR(bins, ms, 1e-12 * ms);
}

TEST(Spectrum, IdealEightBitQuantizer) {
  const auto x = sine_record(2048, 901, 1.8);
  const auto r = spectrum(floor_codes(x, 1.8, 8), 8, 1e5, bin_frequency(901, 1e5, 2048));
  EXPECT_NEAR(r.sndr_db, oracle::ideal_sndr_db(8), 0.5);
  EXPECT_NEAR(r.enob, 8.0, 0.1);
  EXPECT_EQ(r.signal_bin, 901u);
  // Full-scale sine sits at 0 dBFS within the quantization error.
  EXPECT_NEAR(magnitude_dbfs(r, 901), 0.0, 0.1);
}

TEST(Spectrum, SixteenBitQuantizerFloor) {
  const auto x = sine_record(2048, 901, 1.8);
  const auto r = spectrum(floor_codes(x, 1.8, 16), 16, 1e5, bin_frequency(901, 1e5, 2048));
  EXPECT_GE(r.sndr_db, 90.0);
  EXPECT_NEAR(r.sndr_db, oracle::ideal_sndr_db(16), 1.5);
}

TEST(Spectrum, UnquantizedSineIsClean) {
  const auto x = sine_record(2048, 901, 1.8);
  const auto r = spectrum(x, 1e5, bin_frequency(901, 1e5, 2048), 0.9 / std::numbers::sqrt2);
  EXPECT_GT(r.sndr_db, 140.0);
}

TEST(Spectrum, NonCoherentNeedsWindow) {
  std::vector<double> x(2048);
  for (std::size_t k = 0; k < x.size(); ++k)
    x[k] = 0.9 + 0.9 * std::sin(2 * std::numbers::pi * 44e3 * static_cast<double>(k) / 1e5);
  EXPECT_THROW(spectrum(x, 1e5, 44e3, 1.0), std::invalid_argument);
  SpectrumOptions opt;
  opt.hann_window = true;
  const auto r = spectrum(x, 1e5, 44e3, 1.0, opt);
  EXPECT_GT(r.sndr_db, 60.0);
}

TEST(Spectrum, EnobFormula) {
  EXPECT_NEAR(enob_from_sndr(49.92), 8.0, 1e-12);
  EXPECT_NEAR(enob_from_sndr(47.5), 7.598, 1e-3);
}

TEST(Power, QuadraticLaw) {
  EXPECT_DOUBLE_EQ(synapse_dissipation(0.2, 3.0, 45e3), 4.0 * synapse_dissipation(0.1, 3.0, 45e3));
  PipelineAdc a(2, 1.8, 1e5);
  PipelineAdc b(2, 3.6, 1e5);
  const auto va = linearity_ramp(1024, 1.8);
  const auto vb = linearity_ramp(1024, 3.6);
  EXPECT_DOUBLE_EQ(power_estimate(b, vb).p_syn, 4.0 * power_estimate(a, va).p_syn);
}

TEST(Power, AllHrsZeroInputBound) {
  MemristorParams dev;
  PipelineAdc p(2, 1.8, 1e5, Backend::Memristive, dev);
  auto to_hrs = [](Synapse& s) { std::get<MemristiveGain>(s.backend).device.w = 1.0; };
  for (auto& st : p.stages) {
    st.adc.for_each_synapse(to_hrs);
    if (st.dac)
      for (auto& s : st.dac->weights) to_hrs(s);
  }
  const std::vector<double> zero(16, 0.0);
  const auto r = power_estimate(p, zero);
  const double v_ref = 1.8 / 16;
  // Only the bias lines conduct: two cores with four bias synapses at R_off.
  EXPECT_NEAR(r.p_syn, 2 * 4 * v_ref * v_ref / dev.r_off, 1e-18);
  EXPECT_EQ(r.neurons, 9);
}

TEST(Power, NeuronConstantsRollUp) {
  PipelineAdc p(2, 1.8, 1e5);
  PowerModel m;
  m.p_int_per_neuron = 1e-6;
  m.p_act_per_neuron = 2e-6;
  const auto r = power_estimate(p, linearity_ramp(512, 1.8), m);
  EXPECT_DOUBLE_EQ(r.p_int, 9e-6);
  EXPECT_DOUBLE_EQ(r.p_act, 18e-6);
  EXPECT_DOUBLE_EQ(r.total, r.p_int + r.p_act + r.p_syn);
  EXPECT_DOUBLE_EQ(r.fom_j_per_conv, r.total / (std::exp2(7.7) * 1e5));
}

TEST(Fom, Examples) {
  EXPECT_NEAR(fom(272e-6, 7.6, 1.66e9), 0.845e-15, 0.005e-15);
  EXPECT_NEAR(fom(272e-6, 7.6, 1.66e9) / 0.97e-15, 1.0, 0.25);
  EXPECT_EQ(fom(0.0, 7.6, 1.66e9), 0.0);
  EXPECT_NEAR(fom(650e-6, 7.7, 0.74e9), 4.22e-15, 0.01e-15);
  EXPECT_THROW(fom(1.0, 8, 0.0), std::invalid_argument);
}

TEST(Wearout, Examples) {
  EXPECT_NEAR(wearout(8e7, 400).trainings_per_day, 54.79, 0.01);
  EXPECT_EQ(wearout(0.0, 400).trainings_per_day, 0.0);
  EXPECT_TRUE(std::isinf(wearout(8e7, 0).trainings_per_day));
}
