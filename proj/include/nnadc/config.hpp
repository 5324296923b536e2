#pragma once

// Experiment configuration: one JSON document with sections device,
// converter, training, metrics and output. Every key is optional and
// defaults to the reference circuit; unknown keys are errors.

#include "nnadc/metrics.hpp"
#include "nnadc/training.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace nnadc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeviceSection {
  MemristorParams params;
  PulseSpec write = kWritePulsePositive; // amplitude magnitude and T_w
  PulseSpec read = kReadPulse;
  int euler_steps = 100;
  double endurance = kDefaultEndurance;
};

struct ConverterSection {
  int n_bits = 8;
  double v_fs = 1.8;
  double f_s = 1e5;
  Backend backend = Backend::Ideal;
  double comparator_noise_sigma = 0.0;
};

struct MetricsSection {
  std::size_t ramp_points = 0;    // 0 picks default_ramp_points(n_bits)
  std::size_t fft_length = 2048;
  double f_signal = 44e3;         // moved to the nearest odd coherent bin
  bool hann_window = false;
  std::size_t power_samples = 0;  // 0 picks a 4 * 2^N ramp
  double p_int_per_neuron = PowerModel{}.p_int_per_neuron;
  double p_act_per_neuron = PowerModel{}.p_act_per_neuron;
  double f_max = 1.66e9;          // rate used for the extrapolated FOM
};

struct OutputSection {
  std::string directory = "out";
  bool svg = false;
};

struct ExperimentConfig {
  DeviceSection device;
  ConverterSection converter;
  TrainingConfig training;
  MetricsSection metrics;
  OutputSection output;

  /// Throws ConfigError on inconsistent values.
  void validate() const;

  /// Training settings with the converter's v_fs/f_s and the device write
  /// pulse folded in.
  TrainingConfig training_config() const;
  PowerModel power_model() const;
  int n_stages() const { return converter.n_bits / kStageBits; }
  PipelineAdc make_pipeline() const;
};

/// Parses a JSON document; an empty string or "{}" gives the defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON with every key spelled out.
std::string dump_config(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of dump_config(cfg).
std::uint64_t config_hash(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

const char* backend_name(Backend b);
Backend parse_backend(const std::string& s);

} // namespace nnadc
