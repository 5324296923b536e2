#pragma once

// Converter evaluation: histogram DNL/INL, single-tone SNDR/ENOB, power
// roll-up, figure of merit and endurance-limited retraining rate.

#include "nnadc/pipeline.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace nnadc {

struct LinearityReport {
  int n_bits = 0;
  std::vector<double> dnl; // interior codes 1 .. 2^N-2, LSB
  std::vector<double> inl; // same codes, LSB
  double max_abs_dnl = 0.0;
  double max_abs_inl = 0.0;
  std::vector<std::uint32_t> missing_codes;
  std::uint64_t samples = 0;

  /// Code whose entry sits at dnl[k].
  static std::uint32_t code_at(std::size_t k) { return static_cast<std::uint32_t>(k + 1); }
};

/// Histogram method over a monotonic full-scale ramp record. DNL uses the mean
/// interior count as the ideal bin; INL is the running sum of DNL with the
/// straight line through its end points removed. Throws std::invalid_argument
/// for records shorter than 2^N or codes above the full-scale code.
LinearityReport dnl_inl(std::span<const std::uint32_t> codes, int n_bits);

/// Ramp covering [0, v_fs) with `points` samples taken at bin centres
/// (k + 1/2) * v_fs / points.
std::vector<double> linearity_ramp(std::size_t points, double v_fs);

/// Default linearity record length: at least 18432 points and 18 per code.
std::size_t default_ramp_points(int n_bits);

struct SpectrumOptions {
  bool hann_window = false; // required for non-coherent tones
  double coherence_tol = 1e-9;
};

struct SpectrumReport {
  double sndr_db = 0.0;
  double enob = 0.0;
  // One-sided RMS magnitudes of bins 0 .. n/2-1 (n = record length); the
  // Nyquist bin is kept separately. Sum of squares over all of them equals
  // the mean-square value of the record.
  std::vector<double> fft_bins;
  double nyquist_bin = 0.0;
  std::size_t signal_bin = 0;
  double signal_cycles = 0.0;
  double f_s = 0.0;
  double full_scale_rms = 0.0; // reference for dBFS
};

/// Nearest odd bin to f_signal for an n-point record at f_s.
std::size_t coherent_bin(double f_signal, double f_s, std::size_t n);
double bin_frequency(std::size_t bin, double f_s, std::size_t n);

/// Full-scale sine with `bin` whole cycles in n samples, offset to [0, v_fs].
std::vector<double> sine_record(std::size_t n, std::size_t bin, double v_fs,
                                double amplitude_fraction = 1.0);

/// SNDR of a real record: power in the signal bin (plus window leakage) over
/// every other non-DC bin. full_scale_rms only feeds the dBFS scale.
SpectrumReport spectrum(std::span<const double> record, double f_s, double f_signal,
                        double full_scale_rms, const SpectrumOptions& opt = {});

/// Code record variant; full scale is a 2^N-code peak-to-peak sine.
SpectrumReport spectrum(std::span<const std::uint32_t> codes, int n_bits, double f_s,
                        double f_signal, const SpectrumOptions& opt = {});

double enob_from_sndr(double sndr_db);

/// Bin magnitude in dB relative to a full-scale sine.
double magnitude_dbfs(const SpectrumReport& r, std::size_t bin);

struct PowerModel {
  // Per-neuron integration and activation power. The defaults are calibrated
  // so the trained default 8-bit run totals about 272 uW.
  double p_int_per_neuron = 10.0e-6;
  double p_act_per_neuron = 11.65e-6;
  double r_f = kFeedbackResistor;
  double enob = 0.0;   // 0 uses N - 0.3
  double f_conv = 0.0; // 0 uses the pipeline's f_s
};

struct PowerReport {
  double p_int = 0.0;
  double p_act = 0.0;
  double p_syn = 0.0;
  double total = 0.0;
  double fom_j_per_conv = 0.0;
  int neurons = 0;
};

/// v^2 / R of a synapse whose equivalent resistance is r_f / |gain|.
double synapse_dissipation(double v_presyn, double gain, double r_f);

/// Neurons in the pipeline: four per sub-ADC and one output neuron per DAC.
int neuron_count(const PipelineAdc& p);

/// Average synapse dissipation over `samples` plus the neuron constants.
PowerReport power_estimate(const PipelineAdc& p, std::span<const double> samples,
                           const PowerModel& model = {});

/// P / (2^enob * f). Throws std::invalid_argument for f <= 0.
double fom(double total_power, double enob, double f);

inline constexpr double kLifetimeDays = 3650.0;

struct WearoutReport {
  double endurance_cycles = 0.0;
  double cycles_per_training = 0.0;
  double trainings_per_day = 0.0;
};

/// endurance / (cycles_per_training * 3650)
WearoutReport wearout(double endurance, double cycles_per_training);

} // namespace nnadc
