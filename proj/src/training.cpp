#include "nnadc/training.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

namespace nnadc {

void TrainingConfig::validate() const {
  if (!(e_threshold_adc > 0.0) || !(e_threshold_dac > 0.0))
    throw std::invalid_argument("training: thresholds must be positive");
  if (!(eta_adc >= 0.0) || !(eta_dac >= 0.0) || !(eta_scale_kappa >= 0.0))
    throw std::invalid_argument("training: learning rates must be non-negative");
  if (!(coarse_kappa >= 0.0) || !(coarse_decay > 0.0 && coarse_decay < 1.0))
    throw std::invalid_argument("training: coarse_kappa must be >= 0 and coarse_decay in (0, 1)");
  if (!(dac_decay > 0.0 && dac_decay <= 1.0))
    throw std::invalid_argument("training: dac_decay must lie in (0, 1]");
  if (max_epochs < 1) throw std::invalid_argument("training: max_epochs must be >= 1");
  if (samples_per_code < 0) throw std::invalid_argument("training: samples_per_code must be >= 0");
  if (!(init_gain_lo > 0.0 && init_gain_lo <= init_gain_hi))
    throw std::invalid_argument("training: bad initial gain range");
  if (!(init_w_lo >= 0.0 && init_w_lo <= init_w_hi && init_w_hi <= 1.0))
    throw std::invalid_argument("training: bad initial device-state range");
  if (!(v_fs > 0.0) || !(f_s > 0.0))
    throw std::invalid_argument("training: v_fs and f_s must be positive");
}

// ---------------------------------------------------------------- datasets

int default_samples_per_code(int n_total_bits) { return n_total_bits <= 8 ? 4 : 1; }

namespace {

void check_width(int n_total_bits) {
  if (n_total_bits < kStageBits || n_total_bits > 16 || n_total_bits % kStageBits != 0)
    throw std::invalid_argument("unsupported converter width " + std::to_string(n_total_bits) +
                                " (need a multiple of 4 between 4 and 16)");
}

} // namespace

TeachingDataset make_stage_dataset(int n_total_bits, int stage, double v_fs,
                                   int samples_per_code) {
  check_width(n_total_bits);
  const int n_stages = n_total_bits / kStageBits;
  if (stage < 0 || stage >= n_stages) throw std::invalid_argument("make_stage_dataset: bad stage");
  const int spc = samples_per_code > 0 ? samples_per_code : default_samples_per_code(n_total_bits);

  const std::uint64_t n = static_cast<std::uint64_t>(spc) << n_total_bits;
  const std::uint64_t period = n >> (kStageBits * stage);
  const int shift = kStageBits * (n_stages - 1 - stage);

  TeachingDataset ds;
  ds.kind = stage == 0 ? DatasetKind::RampMsb : DatasetKind::SawtoothLsb;
  ds.stage = stage;
  ds.samples.reserve(n);
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    TeachingSample s;
    s.code = static_cast<std::uint32_t>(idx / static_cast<std::uint64_t>(spc));
    s.label = static_cast<Nibble>((s.code >> shift) & 0xFu);
    if (stage == 0) {
      s.v = static_cast<double>(idx) * v_fs / static_cast<double>(n);
    } else {
      s.v = static_cast<double>(idx % period) / static_cast<double>(period) * (v_fs / kStageCodes);
    }
    ds.samples.push_back(s);
  }
  return ds;
}

TeachingDataset make_ramp_dataset(int n_total_bits, double v_fs, int samples_per_code) {
  return make_stage_dataset(n_total_bits, 0, v_fs, samples_per_code);
}

TeachingDataset make_sawtooth_dataset(double v_fs) { return make_stage_dataset(8, 1, v_fs, 4); }

TeachingDataset make_dac_dataset(double v_fs) {
  TeachingDataset ds;
  ds.kind = DatasetKind::DacRamp;
  for (int c = 0; c < kStageCodes; ++c) {
    TeachingSample s;
    s.label = static_cast<Nibble>(c);
    s.code = static_cast<std::uint32_t>(c);
    s.target = c * v_fs / kStageCodes;
    s.v = s.target;
    ds.samples.push_back(s);
  }
  return ds;
}

// ------------------------------------------------------------ update rules

double adc_step_size(const TrainingConfig& cfg, int n_total_bits, int stage,
                     int samples_per_code, int epoch) {
  const int spc = samples_per_code > 0 ? samples_per_code : default_samples_per_code(n_total_bits);
  // Teaching points that share one code of this stage.
  const double per_code =
      std::ldexp(static_cast<double>(spc), n_total_bits - kStageBits * (stage + 1));
  const double v_ref = cfg.v_fs / kStageCodes;
  const double fine = cfg.eta_adc * cfg.eta_scale_kappa * v_ref / per_code;
  if (cfg.coarse_kappa <= 0.0 || epoch < 1) return fine;
  return std::max(fine, cfg.eta_adc * cfg.coarse_kappa * v_ref *
                            std::pow(cfg.coarse_decay, epoch - 1));
}

namespace {

void nudge(Synapse& s, double delta_gain, const MemristorParams& device,
           const WriteScheme& write, std::mt19937_64* rng) {
  if (auto* ideal = std::get_if<IdealGain>(&s.backend)) {
    ideal->value += delta_gain;
  } else {
    s = program_weight(s, device, delta_gain, write, rng);
  }
}

} // namespace

AdcStepResult adc_train_step(SubAdc4& core, double v_in, Nibble label, double eta_eff,
                             const WriteScheme& write, std::mt19937_64* rng) {
  AdcStepResult r;
  r.output = core.convert(v_in, &label, rng);
  const double v_ref = core.v_ref();
  for (int i = 0; i < 4; ++i) {
    const int e = bit_of(label, i) - bit_of(r.output, i);
    r.errors[i] = e;
    if (e == 0) continue;
    // Weights enter the pre-activation with a minus sign.
    nudge(core.bias[i], -eta_eff * e / v_ref, core.device, write, rng);
    for (int j = i + 1; j < 4; ++j)
      if (bit_of(label, j)) nudge(core.feedback[i][j], -eta_eff * e / v_ref, core.device, write, rng);
  }
  return r;
}

double dac_train_step(Dac4& dac, Nibble code, double target, int epoch,
                      const TrainingConfig& cfg, std::mt19937_64* rng) {
  const double err = dac.convert(code) - target;
  if (err == 0.0) return 0.0;
  const double schedule = cfg.eta_dac * std::pow(cfg.dac_decay, epoch);
  for (int i = 0; i < 4; ++i) {
    if (!bit_of(code, i)) continue;
    const double eta_i = schedule * std::ldexp(1.0, i) / 8.0;
    nudge(dac.weights[i], -eta_i * err, dac.device, cfg.write, rng);
  }
  return err;
}

double mse_adc_epoch(std::span<const BitErrors> errors) {
  if (errors.empty()) throw std::invalid_argument("mse_adc_epoch: empty epoch");
  double sum = 0.0;
  for (const auto& e : errors)
    for (int x : e) sum += static_cast<double>(x * x) / 4.0;
  return sum / static_cast<double>(errors.size());
}

double mse_dac_epoch(std::span<const double> errors, double norm) {
  if (errors.empty()) throw std::invalid_argument("mse_dac_epoch: empty epoch");
  if (!(norm > 0.0)) throw std::invalid_argument("mse_dac_epoch: norm must be positive");
  double sum = 0.0;
  for (double e : errors) sum += (e / norm) * (e / norm);
  return sum / static_cast<double>(errors.size());
}

// ----------------------------------------------------------------- trainer

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::DacTraining: return "dac_training";
    case Phase::AdcTraining: return "adc_training";
    case Phase::Operational: return "operational";
  }
  return "unknown";
}

void randomize_weights(PipelineAdc& p, const TrainingConfig& cfg) {
  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> gain(cfg.init_gain_lo, cfg.init_gain_hi);
  std::uniform_real_distribution<double> state(cfg.init_w_lo, cfg.init_w_hi);
  auto draw = [&](Synapse& s) {
    if (auto* ideal = std::get_if<IdealGain>(&s.backend)) {
      ideal->value = gain(rng);
    } else {
      auto& m = std::get<MemristiveGain>(s.backend);
      m.device = MemristorState{state(rng), 0};
      m.sign = +1;
    }
  };
  for (auto& stage : p.stages) {
    stage.adc.for_each_synapse(draw);
    if (stage.dac)
      for (auto& s : stage.dac->weights) draw(s);
  }
}

WriteCycleTally count_write_cycles(const PipelineAdc& p) {
  WriteCycleTally t;
  auto visit = [&](const Synapse& s) {
    if (const auto* m = std::get_if<MemristiveGain>(&s.backend)) {
      t.total += m->device.write_cycles;
      t.max_device = std::max(t.max_device, m->device.write_cycles);
    }
  };
  for (const auto& stage : p.stages) {
    stage.adc.for_each_synapse(visit);
    if (stage.dac)
      for (const auto& s : stage.dac->weights) visit(s);
  }
  return t;
}

namespace {

double train_stage_epoch(SubAdc4& core, const TeachingDataset& ds, double eta,
                         const WriteScheme& write, std::mt19937_64& rng) {
  std::vector<BitErrors> errors;
  errors.reserve(ds.samples.size());
  for (const auto& s : ds.samples)
    errors.push_back(adc_train_step(core, s.v, s.label, eta, write, &rng).errors);
  return mse_adc_epoch(errors);
}

class Trainer {
 public:
  Trainer(PipelineAdc& p, const TrainingConfig& cfg) : p_(p), cfg_(cfg) {
    cfg_.validate();
    n_bits_ = p_.n_bits();
    spc_ = cfg_.samples_per_code > 0 ? cfg_.samples_per_code : default_samples_per_code(n_bits_);
    // Sub-ADC datasets live in the pipeline's own full scale.
    cfg_.v_fs = p_.v_fs;
    for (int k = 0; k < p_.n_stages(); ++k) {
      datasets_.push_back(make_stage_dataset(n_bits_, k, p_.v_fs, spc_));
      std::seed_seq seq{cfg_.rng_seed, static_cast<std::uint64_t>(k) + 1};
      stage_rng_.emplace_back(seq);
    }
    std::seed_seq seq{cfg_.rng_seed, std::uint64_t{0}};
    dac_rng_.seed(seq);
    dac_set_ = make_dac_dataset(p_.v_fs);
    report_.stage_mse.resize(static_cast<std::size_t>(p_.n_stages()));
    for (const auto& s : datasets_.front().samples) {
      report_.staircase_input.push_back(s.v);
      report_.staircase_teach.push_back(s.code);
    }
  }

  TrainingReport run() {
    const bool has_dac = p_.n_stages() > 1;
    report_.phase = has_dac ? Phase::DacTraining : Phase::AdcTraining;

    while (report_.phase == Phase::DacTraining) {
      if (report_.dac_epochs >= cfg_.max_epochs)
        throw NonConvergence("DAC MSE stayed above e_threshold_dac after " +
                                 std::to_string(cfg_.max_epochs) + " epochs",
                             finish());
      const double mse = dac_epoch();
      ++report_.dac_epochs;
      if (mse < cfg_.e_threshold_dac) report_.phase = Phase::AdcTraining; // S1 -> 2
    }

    report_.staircase[0] = p_.convert_all(report_.staircase_input);
    for (int epoch = 1; epoch <= cfg_.max_epochs; ++epoch) {
      const double total = adc_epoch(epoch);
      if (has_dac && cfg_.dac_tracking) dac_epoch();
      report_.adc_epochs = epoch;
      if (report_.adc_threshold_epoch == 0 && total < cfg_.e_threshold_adc) {
        report_.adc_threshold_epoch = epoch;
        report_.staircase[1] = p_.convert_all(report_.staircase_input);
      }
      if (report_.adc_threshold_epoch != 0 && (!cfg_.settle || total == 0.0)) {
        report_.settled = total == 0.0;
        break;
      }
    }
    if (report_.adc_threshold_epoch == 0)
      throw NonConvergence("sub-ADC total MSE stayed above e_threshold_adc after " +
                               std::to_string(cfg_.max_epochs) + " epochs",
                           finish());
    report_.phase = Phase::Operational; // S2 -> 2
    return finish();
  }

 private:
  double dac_epoch() {
    double worst = 0.0;
    std::vector<double> errors;
    for (std::size_t k = 0; k < p_.stages.size(); ++k) {
      auto& stage = p_.stages[k];
      if (!stage.dac) continue;
      // An error at stage k is 16^k times smaller at the converter input, so
      // it is measured against the LSB of the bits still to be resolved.
      const double norm = cfg_.dac_mse_norm == DacMseNorm::Lsb
                              ? std::ldexp(p_.v_fs, -(n_bits_ - kStageBits * static_cast<int>(k)))
                              : p_.v_fs;
      errors.clear();
      for (const auto& s : dac_set_.samples)
        errors.push_back(dac_train_step(*stage.dac, s.label, s.target, dac_epoch_index_, cfg_,
                                        &dac_rng_));
      worst = std::max(worst, mse_dac_epoch(errors, norm));
    }
    ++dac_epoch_index_;
    report_.dac_mse.push_back(worst);
    report_.dac_samples += dac_set_.samples.size();
    report_.trace.push_back({dac_epoch_index_, "dac", worst, report_.samples_consumed(),
                             count_write_cycles(p_).total});
    return worst;
  }

  double adc_epoch(int epoch) {
    const std::size_t n = p_.stages.size();
    std::vector<double> mse(n);
    auto work = [&](std::size_t k) {
      const double eta = adc_step_size(cfg_, n_bits_, static_cast<int>(k), spc_, epoch);
      mse[k] = train_stage_epoch(p_.stages[k].adc, datasets_[k], eta, cfg_.write, stage_rng_[k]);
    };
    if (cfg_.parallel_stages && n > 1) {
      std::vector<std::future<void>> jobs;
      for (std::size_t k = 0; k < n; ++k) jobs.push_back(std::async(std::launch::async, work, k));
      for (auto& j : jobs) j.get();
    } else {
      for (std::size_t k = 0; k < n; ++k) work(k);
    }
    // The stages see their datasets side by side, so an epoch costs one ramp.
    report_.adc_samples += datasets_.front().samples.size();
    const std::uint64_t cycles = count_write_cycles(p_).total;
    for (std::size_t k = 0; k < n; ++k) {
      report_.stage_mse[k].push_back(mse[k]);
      report_.trace.push_back({epoch, "adc" + std::to_string(k), mse[k],
                               report_.samples_consumed(), cycles});
    }
    const double total = std::accumulate(mse.begin(), mse.end(), 0.0);
    report_.adc_total_mse.push_back(total);
    report_.trace.push_back({epoch, "adc_total", total, report_.samples_consumed(), cycles});
    return total;
  }

  TrainingReport finish() {
    const WriteCycleTally t = count_write_cycles(p_);
    report_.write_cycles_total = t.total;
    report_.write_cycles_max = t.max_device;
    ConversionStats stats;
    report_.staircase[2] = p_.convert_all(report_.staircase_input, &stats);
    report_.overrange = stats.overrange;
    if (report_.staircase[1].empty()) report_.staircase[1] = report_.staircase[2];
    return report_;
  }

  PipelineAdc& p_;
  TrainingConfig cfg_;
  int n_bits_ = 0;
  int spc_ = 0;
  std::vector<TeachingDataset> datasets_;
  std::vector<std::mt19937_64> stage_rng_;
  std::mt19937_64 dac_rng_;
  TeachingDataset dac_set_;
  int dac_epoch_index_ = 0;
  TrainingReport report_;
};

} // namespace

TrainingReport train_pipeline(PipelineAdc& p, const TrainingConfig& cfg) {
  return Trainer(p, cfg).run();
}

} // namespace nnadc
