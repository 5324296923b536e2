#include "cli.hpp"

#include "nnadc/csv.hpp"
#include "nnadc/device.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nnadc::cli::run;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("nnadc_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary | std::ios::trunc) << text;
}

nnadc::CsvTable table(const fs::path& p) { return nnadc::parse_csv(slurp(p)); }

std::map<std::string, double> summary(const fs::path& p) {
  std::map<std::string, double> m;
  const auto t = table(p);
  for (std::size_t i = 1; i < t.size(); ++i) m[t[i][0]] = std::stod(t[i][1]);
  return m;
}

} // namespace

TEST(CliTrain, DefaultConfigConverges) {
  const auto dir = scratch("train");
  ASSERT_EQ(run({"train", "--out", dir.string(), "--seed", "2"}), nnadc::cli::kExitOk);
  for (const char* f : {"mse_dac.csv", "mse_adc.csv", "trace.csv", "staircase.csv", "weights.json",
                        "config.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto dac = table(dir / "mse_dac.csv");
  const auto adc = table(dir / "mse_adc.csv");
  EXPECT_EQ(dac[0], (std::vector<std::string>{"epoch", "mse"}));
  // Threshold crossings are recorded in the trajectories.
  bool dac_below = false, adc_below = false;
  for (std::size_t i = 1; i < dac.size(); ++i) dac_below |= std::stod(dac[i][1]) < 9e-3;
  for (std::size_t i = 1; i < adc.size(); ++i) adc_below |= std::stod(adc[i][1]) < 4.5e-2;
  EXPECT_TRUE(dac_below);
  EXPECT_TRUE(adc_below);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["seed"], 2);
  EXPECT_EQ(m["phase"], "operational");
  EXPECT_EQ(m["config_hash"].get<std::string>().size(), 16u);
  const auto stairs = table(dir / "staircase.csv");
  EXPECT_EQ(stairs[0].size(), 6u);
  EXPECT_EQ(stairs.size(), 1025u);
}

TEST(CliTrain, RerunIsByteIdentical) {
  const auto a = scratch("rerun_a");
  const auto b = scratch("rerun_b");
  ASSERT_EQ(run({"train", "--out", a.string(), "--seed", "7"}), 0);
  ASSERT_EQ(run({"train", "--out", b.string(), "--seed", "7"}), 0);
  for (const char* f : {"mse_dac.csv", "mse_adc.csv", "trace.csv", "staircase.csv", "weights.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(CliTrain, OneEpochExitsNonConvergedWithArtifacts) {
  const auto dir = scratch("nonconv");
  write(dir / "cfg.json", R"({"training": {"max_epochs": 1}})");
  EXPECT_EQ(run({"train", "--config", (dir / "cfg.json").string(), "--out", dir.string()}),
            nnadc::cli::kExitNonConvergence);
  EXPECT_TRUE(fs::exists(dir / "mse_dac.csv"));
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["converged"], false);
}

TEST(CliTrain, MalformedConfigNamesKey) {
  const auto dir = scratch("badcfg");
  write(dir / "cfg.json", R"({"training": {"learning_rate": 0.1}})");
  testing::internal::CaptureStderr();
  const int code = run({"train", "--config", (dir / "cfg.json").string(), "--out", dir.string()});
  const auto err = testing::internal::GetCapturedStderr();
  EXPECT_EQ(code, nnadc::cli::kExitUsage);
  EXPECT_NE(err.find("training.learning_rate"), std::string::npos) << err;
}

TEST(CliTrain, RepeatFansOutSeeds) {
  const auto dir = scratch("repeat");
  ASSERT_EQ(run({"train", "--out", dir.string(), "--seed", "3", "--repeat", "2", "--jobs", "2"}), 0);
  EXPECT_TRUE(fs::exists(dir / "seed_3" / "weights.json"));
  EXPECT_TRUE(fs::exists(dir / "seed_4" / "weights.json"));
}

TEST(CliUsage, BadInvocations) {
  testing::internal::CaptureStderr();
  testing::internal::CaptureStdout();
  EXPECT_EQ(run({}), nnadc::cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}), nnadc::cli::kExitUsage);
  EXPECT_EQ(run({"train", "--seed", "-3"}), nnadc::cli::kExitUsage);
  EXPECT_EQ(run({"evaluate", "--out", scratch("noweights").string()}), nnadc::cli::kExitUsage);
  EXPECT_EQ(run({"evaluate", "--weights", "/nonexistent/w.json"}), nnadc::cli::kExitUsage);
  EXPECT_EQ(run({"--version"}), nnadc::cli::kExitOk);
  testing::internal::GetCapturedStdout();
  testing::internal::GetCapturedStderr();
}

TEST(CliEvaluate, IdealConverter) {
  const auto dir = scratch("eval_ideal");
  ASSERT_EQ(run({"evaluate", "--ideal", "--out", dir.string()}), 0);
  auto s = summary(dir / "summary.csv");
  EXPECT_EQ(s["max_abs_dnl"], 0.0);
  EXPECT_EQ(s["max_abs_inl"], 0.0);
  EXPECT_EQ(s["missing_codes"], 0.0);
  EXPECT_NEAR(s["sndr"], 49.9, 0.5);
  EXPECT_EQ(table(dir / "spectrum.csv").size(), 1 + 1025u);
  EXPECT_EQ(table(dir / "linearity.csv").size(), 1 + 254u);
  EXPECT_EQ(table(dir / "power.csv").size(), 5u);
}

TEST(CliEvaluate, TrainedWeightsWithinBands) {
  const auto dir = scratch("eval_trained");
  ASSERT_EQ(run({"train", "--out", dir.string(), "--seed", "1"}), 0);
  ASSERT_EQ(run({"evaluate", "--weights", (dir / "weights.json").string(), "--out", dir.string()}), 0);
  auto s = summary(dir / "summary.csv");
  EXPECT_LE(s["max_abs_dnl"], 0.30);
  EXPECT_LE(s["max_abs_inl"], 0.30);
  EXPECT_GE(s["sndr"], 45.5);
  EXPECT_NEAR(s["power_total"] / 272e-6, 1.0, 0.15);
  EXPECT_EQ(s["fom_at_fmax_quoted"], 0.97e-15);
}

TEST(CliEvaluate, WrongDepthWeightsRejected) {
  const auto dir = scratch("eval_mismatch");
  ASSERT_EQ(run({"train", "--out", dir.string()}), 0);
  write(dir / "cfg.json", R"({"converter": {"n_bits": 12}})");
  testing::internal::CaptureStderr();
  EXPECT_EQ(run({"evaluate", "--config", (dir / "cfg.json").string(), "--weights",
                 (dir / "weights.json").string(), "--out", dir.string()}),
            nnadc::cli::kExitUsage);
  testing::internal::GetCapturedStderr();
}

TEST(CliDeviceSim, EmptyProgramGivesHeaderOnly) {
  const auto dir = scratch("dev_empty");
  write(dir / "p.csv", "");
  ASSERT_EQ(run({"device-sim", "--program", (dir / "p.csv").string(), "--out", dir.string()}), 0);
  EXPECT_EQ(slurp(dir / "trace.csv"), "time_s,w,resistance_ohm\n");
}

TEST(CliDeviceSim, RepeatedWritesMonotoneUntilSaturation) {
  const auto dir = scratch("dev_mono");
  write(dir / "cfg.json", R"({"device": {"thickness_um": 1e-4}})");
  std::string prog = "amplitude_v,duration_s\n";
  for (int i = 0; i < 10; ++i) prog += "0.5,5e-6\n";
  write(dir / "p.csv", prog);
  ASSERT_EQ(run({"device-sim", "--config", (dir / "cfg.json").string(), "--program",
                 (dir / "p.csv").string(), "--out", dir.string(), "--w0", "0.9"}),
            0);
  const auto t = table(dir / "trace.csv");
  ASSERT_EQ(t.size(), 11u);
  double prev = 0.9;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double w = std::stod(t[i][1]);
    if (prev < 1.0) EXPECT_GT(w, prev) << i;
    else EXPECT_EQ(w, 1.0) << i;
    prev = w;
  }
  EXPECT_EQ(prev, 1.0);
}

TEST(CliDeviceSim, AlternatingWritesDrift) {
  // Equal-magnitude pulses move w by different amounts per polarity.
  const auto dir = scratch("dev_alt");
  std::string prog;
  for (int i = 0; i < 10; ++i) prog += "0.5,5e-6\n-0.5,5e-6\n";
  write(dir / "p.csv", prog);
  ASSERT_EQ(run({"device-sim", "--program", (dir / "p.csv").string(), "--out", dir.string()}), 0);
  const auto t = table(dir / "trace.csv");
  ASSERT_EQ(t.size(), 21u);
  const double end = std::stod(t.back()[1]);
  nnadc::MemristorParams p;
  const double per_pair = 5e-6 * (nnadc::state_derivative(p, 0.5) + nnadc::state_derivative(p, -0.5));
  EXPECT_NEAR(end - 0.5, 10 * per_pair, 1e-12);
  EXPECT_LT(end, 0.5 - 1e-6);
}

TEST(CliDeviceSim, MalformedProgram) {
  const auto dir = scratch("dev_bad");
  testing::internal::CaptureStderr();
  write(dir / "p.csv", "0.5\n");
  EXPECT_EQ(run({"device-sim", "--program", (dir / "p.csv").string(), "--out", dir.string()}), 2);
  write(dir / "p.csv", "0.5,-1\n");
  EXPECT_EQ(run({"device-sim", "--program", (dir / "p.csv").string(), "--out", dir.string()}), 2);
  EXPECT_EQ(run({"device-sim", "--program", (dir / "missing.csv").string()}), 2);
  testing::internal::GetCapturedStderr();
}

TEST(CliScaleReport, FlatAndPipelineTables) {
  const auto dir = scratch("scale");
  testing::internal::CaptureStdout();
  ASSERT_EQ(run({"scale-report", "--bits", "4", "8", "--out", (dir / "flat").string()}), 0);
  ASSERT_EQ(run({"scale-report", "--bits", "8", "--pipeline", "--out", (dir / "p8").string()}), 0);
  ASSERT_EQ(run({"scale-report", "--bits", "12", "--pipeline", "--out", (dir / "p12").string()}), 0);
  const auto out = testing::internal::GetCapturedStdout();
  EXPECT_NE(out.find("fom at f_max"), std::string::npos);
  const auto flat = table(dir / "flat" / "scaling.csv");
  ASSERT_EQ(flat.size(), 3u);
  EXPECT_EQ(flat[1][3], "10");
  EXPECT_EQ(flat[2][3], "36");
  EXPECT_EQ(table(dir / "p8" / "scaling.csv")[1][3], "24");
  EXPECT_EQ(table(dir / "p12" / "scaling.csv")[1][3], "38");
  const auto cmp = table(dir / "p12" / "comparison.csv");
  bool has_iv = false;
  for (const auto& r : cmp) has_iv |= r[0] == "pipeline-12";
  EXPECT_TRUE(has_iv);
}
