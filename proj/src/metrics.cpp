#include "nnadc/metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nnadc {

// -------------------------------------------------------------- linearity

LinearityReport dnl_inl(std::span<const std::uint32_t> codes, int n_bits) {
  if (n_bits < 2 || n_bits > 24) throw std::invalid_argument("dnl_inl: unsupported width");
  const std::size_t n_codes = std::size_t{1} << n_bits;
  if (codes.size() < n_codes)
    throw std::invalid_argument("dnl_inl: record of " + std::to_string(codes.size()) +
                                " samples is shorter than 2^" + std::to_string(n_bits));

  std::vector<std::uint64_t> hist(n_codes, 0);
  for (std::uint32_t c : codes) {
    if (c >= n_codes) throw std::invalid_argument("dnl_inl: code out of range");
    ++hist[c];
  }

  LinearityReport r;
  r.n_bits = n_bits;
  r.samples = codes.size();
  const std::size_t interior = n_codes - 2;
  std::uint64_t interior_hits = 0;
  for (std::size_t c = 1; c + 1 < n_codes; ++c) interior_hits += hist[c];
  if (interior_hits == 0) throw std::invalid_argument("dnl_inl: no interior codes hit");
  const double ideal = static_cast<double>(interior_hits) / static_cast<double>(interior);

  r.dnl.resize(interior);
  r.inl.resize(interior);
  double run = 0.0;
  for (std::size_t k = 0; k < interior; ++k) {
    const std::uint64_t h = hist[k + 1];
    r.dnl[k] = h == 0 ? -1.0 : static_cast<double>(h) / ideal - 1.0;
    if (h == 0) r.missing_codes.push_back(LinearityReport::code_at(k));
    run += r.dnl[k];
    r.inl[k] = run;
  }
  // End-point fit: the transition below the first interior code sits at 0,
  // the one above the last at the final running sum.
  const double slope = run / static_cast<double>(interior);
  for (std::size_t k = 0; k < interior; ++k) {
    r.inl[k] -= slope * static_cast<double>(k + 1);
    r.max_abs_dnl = std::max(r.max_abs_dnl, std::abs(r.dnl[k]));
    r.max_abs_inl = std::max(r.max_abs_inl, std::abs(r.inl[k]));
  }
  return r;
}

std::vector<double> linearity_ramp(std::size_t points, double v_fs) {
  std::vector<double> v(points);
  for (std::size_t k = 0; k < points; ++k)
    v[k] = (static_cast<double>(k) + 0.5) * v_fs / static_cast<double>(points);
  return v;
}

std::size_t default_ramp_points(int n_bits) {
  const std::size_t codes = std::size_t{1} << n_bits;
  const std::size_t per_code = std::max<std::size_t>(18, (18432 + codes - 1) / codes);
  return per_code * codes;
}

// --------------------------------------------------------------- spectrum

std::size_t coherent_bin(double f_signal, double f_s, std::size_t n) {
  if (!(f_s > 0.0) || n < 8) throw std::invalid_argument("coherent_bin: bad record");
  const double exact = f_signal * static_cast<double>(n) / f_s;
  if (!(exact > 0.0) || exact >= static_cast<double>(n / 2))
    throw std::invalid_argument("coherent_bin: tone outside (0, f_s/2)");
  auto k = static_cast<std::size_t>(std::floor(exact));
  if (k % 2 == 0) k = (exact - static_cast<double>(k) > 0.5 || k == 0) ? k + 1 : k - 1;
  if (k >= n / 2) k -= 2;
  return k;
}

double bin_frequency(std::size_t bin, double f_s, std::size_t n) {
  return static_cast<double>(bin) * f_s / static_cast<double>(n);
}

std::vector<double> sine_record(std::size_t n, std::size_t bin, double v_fs,
                                double amplitude_fraction) {
  std::vector<double> v(n);
  const double amp = 0.5 * v_fs * amplitude_fraction;
  for (std::size_t k = 0; k < n; ++k) {
    // Reduce the phase in integers so every period repeats bit-exactly.
    const double phase = 2.0 * std::numbers::pi * static_cast<double>((k * bin) % n) /
                         static_cast<double>(n);
    v[k] = 0.5 * v_fs + amp * std::sin(phase);
  }
  return v;
}

namespace {

std::mutex g_fftw_planner;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

} // namespace

double enob_from_sndr(double sndr_db) { return (sndr_db - 1.76) / 6.02; }

SpectrumReport spectrum(std::span<const double> record, double f_s, double f_signal,
                        double full_scale_rms, const SpectrumOptions& opt) {
  const std::size_t n = record.size();
  if (n < 8 || n % 2 != 0) throw std::invalid_argument("spectrum: record length must be even and >= 8");
  if (!(f_s > 0.0)) throw std::invalid_argument("spectrum: f_s must be positive");
  const double cycles = f_signal * static_cast<double>(n) / f_s;
  if (!(cycles > 0.0) || cycles >= static_cast<double>(n / 2))
    throw std::invalid_argument("spectrum: tone outside (0, f_s/2)");
  const double nearest = std::round(cycles);
  const bool coherent = std::abs(cycles - nearest) <= opt.coherence_tol * std::max(1.0, cycles);
  if (!coherent && !opt.hann_window)
    throw std::invalid_argument("spectrum: " + std::to_string(f_signal) +
                                " Hz is not coherent with the record; enable the window");

  std::unique_ptr<double, FftwFree> in(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(n / 2 + 1));
  double window_power = 1.0;
  if (opt.hann_window) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                            static_cast<double>(n));
      in.get()[k] = record[k] * w;
      acc += w * w;
    }
    window_power = acc / static_cast<double>(n);
  } else {
    std::copy(record.begin(), record.end(), in.get());
  }

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_planner);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_fftw_planner);
    fftw_destroy_plan(plan);
  }

  SpectrumReport r;
  r.f_s = f_s;
  r.signal_cycles = cycles;
  r.full_scale_rms = full_scale_rms;
  r.fft_bins.resize(n / 2);
  const double scale = 1.0 / (static_cast<double>(n) * std::sqrt(window_power));
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double mag = std::hypot(out.get()[k][0], out.get()[k][1]) * scale;
    r.fft_bins[k] = k == 0 ? mag : mag * std::numbers::sqrt2;
  }
  r.nyquist_bin = std::hypot(out.get()[n / 2][0], out.get()[n / 2][1]) * scale;

  r.signal_bin = static_cast<std::size_t>(nearest);
  // Hann leakage spreads DC and the tone over neighbouring bins.
  const std::size_t spread = opt.hann_window ? 5 : 0;
  double signal = 0.0;
  double rest = r.nyquist_bin * r.nyquist_bin;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double p = r.fft_bins[k] * r.fft_bins[k];
    const std::size_t d = k > r.signal_bin ? k - r.signal_bin : r.signal_bin - k;
    if (d <= spread) {
      signal += p;
    } else if (k > spread) {
      rest += p;
    }
  }
  r.sndr_db = rest > 0.0 ? 10.0 * std::log10(signal / rest)
                         : std::numeric_limits<double>::infinity();
  r.enob = enob_from_sndr(r.sndr_db);
  return r;
}

SpectrumReport spectrum(std::span<const std::uint32_t> codes, int n_bits, double f_s,
                        double f_signal, const SpectrumOptions& opt) {
  std::vector<double> x(codes.begin(), codes.end());
  const double fs_rms = std::ldexp(1.0, n_bits - 1) / std::numbers::sqrt2;
  return spectrum(x, f_s, f_signal, fs_rms, opt);
}

double magnitude_dbfs(const SpectrumReport& r, std::size_t bin) {
  const double m = bin < r.fft_bins.size() ? r.fft_bins[bin] : r.nyquist_bin;
  const double ref = r.full_scale_rms > 0.0 ? r.full_scale_rms : 1.0;
  return 20.0 * std::log10(std::max(m / ref, 1e-15));
}

// ------------------------------------------------------------------ power

double synapse_dissipation(double v_presyn, double gain, double r_f) {
  return v_presyn * v_presyn * std::abs(gain) / r_f;
}

int neuron_count(const PipelineAdc& p) {
  int n = 0;
  for (const auto& s : p.stages) n += 4 + (s.dac ? 1 : 0);
  return n;
}

PowerReport power_estimate(const PipelineAdc& p, std::span<const double> samples,
                           const PowerModel& model) {
  PowerReport r;
  r.neurons = neuron_count(p);
  const double r_f = model.r_f;
  const double v_ref = p.v_fs / kStageCodes;

  double acc = 0.0;
  for (double v_in : samples) {
    double held = std::clamp(v_in, 0.0, p.v_fs);
    double sum = 0.0;
    for (const auto& stage : p.stages) {
      const SubAdc4& adc = stage.adc;
      const Nibble code = adc.convert(held);
      // Input resistor r_f / g carries the held value.
      sum += synapse_dissipation(held, adc.input_gain, r_f);
      for (int i = 0; i < 4; ++i) {
        sum += synapse_dissipation(v_ref, synapse_gain(adc.bias[i], adc.device), r_f);
        for (int j = i + 1; j < 4; ++j)
          sum += synapse_dissipation(v_ref * bit_of(code, j),
                                     synapse_gain(adc.feedback[i][j], adc.device), r_f);
      }
      if (!stage.dac) break;
      // DAC synapse i sees V_FS * D_i through 16 r_f / u_i.
      for (int i = 0; i < 4; ++i)
        sum += synapse_dissipation(p.v_fs * bit_of(code, i), stage.dac->gain(i),
                                   kStageCodes * r_f);
      held = residue_clip(residue(adc.input_gain * held, stage.dac->convert(code)), p.v_fs);
    }
    acc += sum;
  }
  r.p_syn = samples.empty() ? 0.0 : acc / static_cast<double>(samples.size());
  r.p_int = model.p_int_per_neuron * r.neurons;
  r.p_act = model.p_act_per_neuron * r.neurons;
  r.total = r.p_int + r.p_act + r.p_syn;
  const double enob = model.enob > 0.0 ? model.enob : p.n_bits() - 0.3;
  const double f = model.f_conv > 0.0 ? model.f_conv : p.f_s;
  r.fom_j_per_conv = fom(r.total, enob, f);
  return r;
}

double fom(double total_power, double enob, double f) {
  if (!(f > 0.0)) throw std::invalid_argument("fom: conversion rate must be positive");
  return total_power / (std::exp2(enob) * f);
}

WearoutReport wearout(double endurance, double cycles_per_training) {
  WearoutReport w;
  w.endurance_cycles = endurance;
  w.cycles_per_training = cycles_per_training;
  if (endurance <= 0.0) return w;
  w.trainings_per_day = cycles_per_training > 0.0
                            ? endurance / (cycles_per_training * kLifetimeDays)
                            : std::numeric_limits<double>::infinity();
  return w;
}

} // namespace nnadc
