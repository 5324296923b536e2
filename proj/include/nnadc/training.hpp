#pragma once

// Online SGD training of the pipeline: teaching datasets, the sub-ADC and DAC
// update rules, epoch MSE bookkeeping and the S1/S2 phase sequence.

#include "nnadc/pipeline.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nnadc {

/// How DAC epoch MSE is normalized before comparing with e_threshold_dac.
enum class DacMseNorm {
  Lsb,       // (V_out - t)^2 / LSB^2 of the whole pipeline
  FullScale  // (V_out - t)^2 / V_FS^2
};

struct TrainingConfig {
  double eta_adc = 1.0;
  double eta_dac = 1.0;
  // Sub-ADC step: eta_adc * kappa * V_ref / (teaching samples per stage code).
  double eta_scale_kappa = 0.25;
  // Early epochs use max(step, eta_adc * coarse_kappa * V_ref * coarse_decay^(epoch-1)),
  // so thresholds far from their targets move in few writes.
  double coarse_kappa = 0.5;
  double coarse_decay = 0.7;
  double e_threshold_adc = 4.5e-2;
  double e_threshold_dac = 9e-3;
  double f_s = 1e5;
  double v_fs = 1.8;
  int max_epochs = 500; // per phase
  std::uint64_t rng_seed = 1;

  double dac_decay = 0.99;
  DacMseNorm dac_mse_norm = DacMseNorm::Lsb;
  // Keep the DAC learning rule running while the sub-ADCs train.
  bool dac_tracking = true;
  // After the sub-ADC threshold is met, keep training until an error-free epoch.
  bool settle = true;
  // Teaching ramp density; 0 picks 4 for 8-bit and 1 for wider pipelines.
  int samples_per_code = 0;

  // Random initial gains (ideal backend), as multiples of the unit gain.
  double init_gain_lo = 0.25;
  double init_gain_hi = 1.25;
  // Random initial device states (memristive backend).
  double init_w_lo = 0.3;
  double init_w_hi = 0.7;

  WriteScheme write;
  bool parallel_stages = false;

  void validate() const;
};

// ---------------------------------------------------------------- datasets

enum class DatasetKind { RampMsb, SawtoothLsb, DacRamp };

struct TeachingSample {
  double v = 0.0;          // analog input presented to the block (pre-gain)
  Nibble label = 0;        // T_i for the block's four bits
  double target = 0.0;     // analog target t (DAC datasets)
  std::uint32_t code = 0;  // full N-bit code of the ramp point
};

struct TeachingDataset {
  DatasetKind kind = DatasetKind::RampMsb;
  int stage = 0;
  std::vector<TeachingSample> samples;
};

int default_samples_per_code(int n_total_bits);

/// Ramp over [0, V_FS): samples_per_code * 2^n points, labels = MSB nibble.
TeachingDataset make_ramp_dataset(int n_total_bits, double v_fs, int samples_per_code = 0);

/// Teaching set of stage `stage` of an n_total_bits pipeline: the ideal
/// residue of the ramp at that stage (a sawtooth for stage > 0) with that
/// stage's nibble as label.
TeachingDataset make_stage_dataset(int n_total_bits, int stage, double v_fs,
                                   int samples_per_code = 0);

/// Second-stage sawtooth of the 8-bit pipeline: 1024 points, period 64.
TeachingDataset make_sawtooth_dataset(double v_fs);

/// 16 codes with analog targets code * V_FS / 16.
TeachingDataset make_dac_dataset(double v_fs);

// ------------------------------------------------------------ update rules

/// T_i - D_i per bit (index = bit significance).
using BitErrors = std::array<int, 4>;

struct AdcStepResult {
  Nibble output = 0;
  BitErrors errors{};
};

/// Step size of stage `stage` in volts at sub-ADC epoch `epoch` (1-based).
double adc_step_size(const TrainingConfig& cfg, int n_total_bits, int stage,
                     int samples_per_code, int epoch = 0);

/// One teacher-forced SGD step on a sub-ADC:
/// dW_ij = -eta_eff * (T_i - D_i) * T_j, and the bias with presynaptic input 1.
AdcStepResult adc_train_step(SubAdc4& core, double v_in, Nibble label, double eta_eff,
                             const WriteScheme& write = {}, std::mt19937_64* rng = nullptr);

/// One time-varying DAC step: du_i = -eta_i(epoch) * (V_out - t) * D_i with
/// eta_i = eta_dac * 2^i / 8 * decay^epoch. Returns V_out - t (before the update).
double dac_train_step(Dac4& dac, Nibble code, double target, int epoch,
                      const TrainingConfig& cfg, std::mt19937_64* rng = nullptr);

/// Mean over samples of sum_i (T_i - D_i)^2 / 4.
double mse_adc_epoch(std::span<const BitErrors> errors);

/// Mean over samples of (V_out - t)^2 / norm^2.
double mse_dac_epoch(std::span<const double> errors, double norm);

// ----------------------------------------------------------------- trainer

enum class Phase {
  DacTraining, // S1 in position 1
  AdcTraining, // S1 in position 2, S2 in position 1
  Operational  // S2 in position 2
};

const char* phase_name(Phase p);

struct TraceRow {
  int epoch = 0;
  std::string block_id;
  double mse = 0.0;
  std::uint64_t samples_consumed = 0;
  std::uint64_t write_cycles = 0;
};

struct TrainingReport {
  Phase phase = Phase::DacTraining;
  std::vector<double> dac_mse;                  // every DAC epoch
  std::vector<double> adc_total_mse;            // every sub-ADC epoch, summed over stages
  std::vector<std::vector<double>> stage_mse;   // [stage][epoch]
  int dac_epochs = 0;           // epochs until S1 flipped
  int adc_threshold_epoch = 0;  // first sub-ADC epoch with total MSE below threshold
  int adc_epochs = 0;           // epochs until S2 flipped
  bool settled = false;         // S2 flipped on an error-free epoch
  std::uint64_t dac_samples = 0;
  std::uint64_t adc_samples = 0;
  std::uint64_t write_cycles_total = 0;
  std::uint64_t write_cycles_max = 0; // busiest single device
  std::uint64_t overrange = 0;        // residue clips on the final staircase
  std::vector<TraceRow> trace;
  // Ramp conversions at the start of the sub-ADC phase, at the threshold
  // crossing, and when training ended.
  std::vector<double> staircase_input;
  std::vector<std::uint32_t> staircase_teach;
  std::array<std::vector<std::uint32_t>, 3> staircase;

  std::uint64_t samples_consumed() const { return dac_samples + adc_samples; }
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, TrainingReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const TrainingReport& report() const { return report_; }

 private:
  TrainingReport report_;
};

/// Random initial state drawn from cfg.rng_seed.
void randomize_weights(PipelineAdc& p, const TrainingConfig& cfg);

struct WriteCycleTally {
  std::uint64_t total = 0;
  std::uint64_t max_device = 0;
};
WriteCycleTally count_write_cycles(const PipelineAdc& p);

/// Runs the DAC phase then the sub-ADC phase. Throws NonConvergence when a
/// phase does not reach its threshold within cfg.max_epochs.
TrainingReport train_pipeline(PipelineAdc& p, const TrainingConfig& cfg);

} // namespace nnadc
