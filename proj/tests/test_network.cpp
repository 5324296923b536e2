#include "nnadc/network.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace nnadc;

TEST(SubAdc4, IdealCodes) {
  SubAdc4 core(1.8, 1.0);
  const double v_ref = 1.8 / 16;
  EXPECT_EQ(core.convert(0.0), 0b0000);
  EXPECT_EQ(core.convert(8 * v_ref), 0b1000);
  EXPECT_EQ(core.convert(15.6 * v_ref), 0b1111);
}

TEST(SubAdc4, IdealMatchesFloorOracleEverywhere) {
  SubAdc4 core(1.8, 1.0);
  for (int k = 0; k < 16; ++k) {
    const double edge = k * 1.8 / 16;
    EXPECT_EQ(core.convert(edge), oracle::floor_quantize(edge, 1.8, 4)) << "edge " << k;
  }
  for (double v : oracle::random_uniform(20000, 0.0, 1.8, 21))
    ASSERT_EQ(core.convert(v), oracle::floor_quantize(v, 1.8, 4)) << v;
}

TEST(SubAdc4, InputGainScalesRange) {
  SubAdc4 core(1.8, 16.0);
  // 16 * V_FS/32 sits at mid-scale.
  EXPECT_EQ(core.convert(1.8 / 32), 0b1000);
}

TEST(SubAdc4, TeacherForcingUsesLabelBits) {
  SubAdc4 core(1.8, 1.0);
  const double v = 0.95; // code 8 on its own
  const Nibble label = 0b0000;
  // With D_3 forced to 0, neuron 2 no longer subtracts the MSB feedback.
  const Nibble forced = core.convert(v, &label);
  EXPECT_EQ(forced & 0b1000, 0b1000);
  EXPECT_EQ(forced & 0b0100, 0b0100);
}

TEST(SubAdc4, PreActivationSigns) {
  SubAdc4 core(1.8, 1.0);
  const double v_ref = 1.8 / 16;
  EXPECT_DOUBLE_EQ(core.pre_activation(3, 0.0, 0), -8 * v_ref);
  EXPECT_DOUBLE_EQ(core.pre_activation(0, 1.0, 0b1110), 1.0 - v_ref - 14 * v_ref);
}

TEST(SubAdc4, TenTrainableSynapses) {
  SubAdc4 core(1.8, 1.0);
  int n = 0;
  core.for_each_synapse([&](const Synapse&) { ++n; });
  EXPECT_EQ(n, 10);
  EXPECT_EQ(SubAdc4::trainable_synapses(), 10);
}

TEST(Dac4, IdealOutputs) {
  Dac4 dac(1.8);
  EXPECT_EQ(dac.convert(0b0000), 0.0);
  EXPECT_DOUBLE_EQ(dac.convert(0b1111), 1.6875);
  EXPECT_DOUBLE_EQ(dac.convert(0b1000), 0.9);
}

TEST(Residue, HandValues) {
  EXPECT_EQ(residue(0.9, 0.9), 0.0);
  EXPECT_EQ(residue(0.0, 0.0), 0.0);
  SubAdc4 core(1.8, 1.0);
  Dac4 dac(1.8);
  const Nibble code = core.convert(1.0);
  EXPECT_EQ(code, 8);
  EXPECT_NEAR(residue(1.0, dac.convert(code)), 0.1, 1e-15);
}

TEST(Synapse, EquivalentGains) {
  MemristorParams p;
  Synapse lrs{MemristiveGain{{0.0, 0}, +1, kFeedbackResistor}};
  Synapse hrs{MemristiveGain{{1.0, 0}, -1, kFeedbackResistor}};
  EXPECT_DOUBLE_EQ(synapse_gain(lrs, p), 22.5);
  EXPECT_DOUBLE_EQ(synapse_gain(hrs, p), -0.45);
  EXPECT_EQ(synapse_gain(Synapse::ideal(8.0), p), 8.0);
  const auto [lo, hi] = gain_range(p);
  EXPECT_DOUBLE_EQ(lo, 0.45);
  EXPECT_DOUBLE_EQ(hi, 22.5);
}

TEST(Synapse, MemristiveRealizesRequestedGain) {
  MemristorParams p;
  for (double g : {-8.0, -1.0, 0.5, 2.0, 4.0, 20.0})
    EXPECT_NEAR(synapse_gain(Synapse::memristive(g, p), p), g, 1e-12) << g;
  // Outside the range it clips to the achievable bound.
  EXPECT_DOUBLE_EQ(synapse_gain(Synapse::memristive(100.0, p), p), 22.5);
}

TEST(ProgramWeight, ZeroDeltaDoesNothing) {
  MemristorParams p;
  const auto s = Synapse::memristive(4.0, p);
  const auto out = program_weight(s, p, 0.0);
  const auto& m = std::get<MemristiveGain>(out.backend);
  EXPECT_EQ(m.device.w, std::get<MemristiveGain>(s.backend).device.w);
  EXPECT_EQ(m.device.write_cycles, 0u);
}

TEST(ProgramWeight, SaturatedDeviceOnlyCountsCycle) {
  MemristorParams p;
  p.thickness_um = 1e-4;
  Synapse s{MemristiveGain{{0.0, 0}, +1, kFeedbackResistor}};
  const auto out = program_weight(s, p, 1.0);
  const auto& m = std::get<MemristiveGain>(out.backend);
  EXPECT_EQ(m.device.w, 0.0);
  EXPECT_EQ(m.device.write_cycles, 1u);
}

TEST(ProgramWeight, DirectionFollowsDeltaForBothSigns) {
  MemristorParams p;
  p.thickness_um = 1e-4;
  for (double g : {4.0, -4.0}) {
    const auto s = Synapse::memristive(g, p);
    const double up = synapse_gain(program_weight(s, p, 0.1), p);
    const double down = synapse_gain(program_weight(s, p, -0.1), p);
    EXPECT_GT(up, g) << g;
    EXPECT_LT(down, g) << g;
    // A single pulse tracks small requests closely.
    EXPECT_NEAR(up - g, 0.1, 0.02) << g;
  }
}

TEST(ProgramWeight, IdealSynapseRejected) {
  MemristorParams p;
  EXPECT_THROW(program_weight(Synapse::ideal(1.0), p, 0.1), std::invalid_argument);
}

TEST(Bits, MsbFirst) {
  const auto b = bits_msb_first(0b1010);
  EXPECT_EQ(b, (std::array<int, 4>{1, 0, 1, 0}));
}
