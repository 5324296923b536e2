#include "cli.hpp"

#include "nnadc/config.hpp"
#include "nnadc/csv.hpp"
#include "nnadc/metrics.hpp"
#include "nnadc/scaling.hpp"
#include "nnadc/simd.hpp"
#include "nnadc/weights.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#ifndef NNADC_VERSION
#define NNADC_VERSION "0.0.0"
#endif

namespace nnadc::cli {

namespace fs = std::filesystem;

const char* version() { return "nnadc " NNADC_VERSION; }

namespace {

// Errors that map to exit code 2 once the command has started.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config;
  std::string out;
  long long seed = -1;
  bool svg = false;
};

ExperimentConfig load(const CommonFlags& f) {
  ExperimentConfig c = f.config.empty() ? parse_config("") : load_config(f.config);
  if (f.seed >= 0) c.training.rng_seed = static_cast<std::uint64_t>(f.seed);
  if (!f.out.empty()) c.output.directory = f.out;
  if (f.svg) c.output.svg = true;
  return c;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw UsageError("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

std::string hex64(std::uint64_t v) {
  char b[17];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(v));
  return b;
}

// ------------------------------------------------------------------ svg

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void write_svg(const fs::path& path, const std::string& title, const std::vector<Series>& series,
               bool log_y = false, bool steps = false) {
  const double w = 640, h = 400, m = 50;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-12)) : y; };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << m << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title
      << (log_y ? " (log10)" : "") << "</text>\n";
  out << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << w - 2 * m << "\" height=\""
      << h - 2 * m << "\" fill=\"none\" stroke=\"#888\"/>\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    out << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << colors[k % 4] << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double px = m + (s.x[i] - x0) / (x1 - x0) * (w - 2 * m);
      const double py = h - m - (ty(s.y[i]) - y0) / (y1 - y0) * (h - 2 * m);
      if (steps && i > 0) {
        const double prev = h - m - (ty(s.y[i - 1]) - y0) / (y1 - y0) * (h - 2 * m);
        out << px << ',' << prev << ' ';
      }
      out << px << ',' << py << ' ';
    }
    out << "\"/>\n<text x=\"" << w - m - 120 << "\" y=\"" << m + 16 + 16 * k
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << colors[k % 4] << "\">"
        << s.label << "</text>\n";
  }
  out << "<text x=\"" << m << "\" y=\"" << h - 15 << "\" font-family=\"sans-serif\" font-size=\"11\">x: "
      << x0 << " .. " << x1 << "   y: " << y0 << " .. " << y1 << "</text>\n</svg>\n";
}

// ---------------------------------------------------------------- train

struct TrainOutcome {
  int exit_code = kExitOk;
  std::string message;
};

void write_training_artifacts(const fs::path& dir, const TrainingReport& r,
                              std::vector<std::string>& files, bool svg) {
  {
    CsvWriter w(dir / "mse_dac.csv", {"epoch", "mse"});
    for (std::size_t e = 0; e < r.dac_mse.size(); ++e)
      w.row({csv_number(static_cast<int>(e + 1)), csv_number(r.dac_mse[e])});
    files.push_back("mse_dac.csv");
  }
  {
    CsvWriter w(dir / "mse_adc.csv", {"epoch", "mse"});
    for (std::size_t e = 0; e < r.adc_total_mse.size(); ++e)
      w.row({csv_number(static_cast<int>(e + 1)), csv_number(r.adc_total_mse[e])});
    files.push_back("mse_adc.csv");
  }
  {
    CsvWriter w(dir / "trace.csv", {"epoch", "block_id", "mse", "samples_consumed", "write_cycles"});
    for (const auto& t : r.trace)
      w.row({csv_number(t.epoch), t.block_id, csv_number(t.mse), csv_number(t.samples_consumed),
             csv_number(t.write_cycles)});
    files.push_back("trace.csv");
  }
  if (!r.staircase_input.empty() && !r.staircase[2].empty()) {
    CsvWriter w(dir / "staircase.csv", {"index", "input_v", "teach_code", "code_start",
                                        "code_threshold", "code_final"});
    for (std::size_t i = 0; i < r.staircase_input.size(); ++i) {
      auto at = [&](int k) {
        return r.staircase[k].empty() ? std::string() : csv_number(static_cast<std::uint64_t>(r.staircase[k][i]));
      };
      w.row({csv_number(static_cast<std::uint64_t>(i)), csv_number(r.staircase_input[i]),
             csv_number(static_cast<std::uint64_t>(r.staircase_teach[i])), at(0), at(1), at(2)});
    }
    files.push_back("staircase.csv");
  }
  if (svg) {
    auto epochs = [](std::size_t n) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i + 1);
      return x;
    };
    if (!r.dac_mse.empty()) {
      write_svg(dir / "mse_dac.svg", "DAC MSE per epoch",
                {{"dac", epochs(r.dac_mse.size()), r.dac_mse}}, true);
      files.push_back("mse_dac.svg");
    }
    if (!r.adc_total_mse.empty()) {
      write_svg(dir / "mse_adc.svg", "sub-ADC total MSE per epoch",
                {{"total", epochs(r.adc_total_mse.size()), r.adc_total_mse}}, true);
      files.push_back("mse_adc.svg");
    }
    if (!r.staircase[2].empty()) {
      std::vector<Series> s;
      const char* names[] = {"start", "threshold", "final"};
      for (int k = 0; k < 3; ++k) {
        if (r.staircase[k].empty()) continue;
        s.push_back({names[k], r.staircase_input,
                     std::vector<double>(r.staircase[k].begin(), r.staircase[k].end())});
      }
      write_svg(dir / "staircase.svg", "output code vs ramp input", s, false, true);
      files.push_back("staircase.svg");
    }
  }
}

TrainOutcome train_one(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineAdc p = cfg.make_pipeline();
  const TrainingConfig tc = cfg.training_config();
  randomize_weights(p, tc);

  TrainOutcome outcome;
  TrainingReport report;
  try {
    report = train_pipeline(p, tc);
  } catch (const NonConvergence& e) {
    report = e.report();
    outcome.exit_code = kExitNonConvergence;
    outcome.message = e.what();
  }

  std::vector<std::string> files;
  write_training_artifacts(dir, report, files, cfg.output.svg);
  save_weights_file(dir / "weights.json", p, report.phase);
  files.push_back("weights.json");
  {
    std::ofstream c(dir / "config.json", std::ios::binary | std::ios::trunc);
    c << dump_config(cfg);
    files.push_back("config.json");
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto cycles = report.write_cycles_max;
  nlohmann::json m = {
      {"version", version()},
      {"config_hash", hex64(config_hash(cfg))},
      {"seed", cfg.training.rng_seed},
      {"artifacts", files},
      {"wall_clock_s", secs},
      {"converged", outcome.exit_code == kExitOk},
      {"phase", phase_name(report.phase)},
      {"dac_epochs", report.dac_epochs},
      {"adc_threshold_epoch", report.adc_threshold_epoch},
      {"adc_epochs", report.adc_epochs},
      {"settled", report.settled},
      {"samples_consumed", report.samples_consumed()},
      {"training_time_ms", training_time_ms(static_cast<double>(report.samples_consumed()),
                                            cfg.converter.f_s)},
      {"write_cycles_total", report.write_cycles_total},
      {"write_cycles_max", cycles},
      {"overrange", report.overrange},
      {"simd", simd::isa_name(simd::active_isa())}};
  if (cycles > 0)
    m["wearout_per_day"] = wearout(cfg.device.endurance, static_cast<double>(cycles)).trainings_per_day;
  std::ofstream(dir / "manifest.json", std::ios::binary | std::ios::trunc) << m.dump(2) << "\n";

  if (outcome.exit_code == kExitOk) {
    log << "seed " << cfg.training.rng_seed << ": DAC " << report.dac_epochs
        << " epochs, sub-ADC threshold at epoch " << report.adc_threshold_epoch << ", "
        << (report.settled ? "settled" : "stopped") << " at epoch " << report.adc_epochs << ", "
        << report.samples_consumed() << " samples -> " << dir.string() << "\n";
  } else {
    log << "seed " << cfg.training.rng_seed << ": did not converge: " << outcome.message << "\n";
  }
  return outcome;
}

int cmd_train(const CommonFlags& flags, int repeat, int jobs) {
  ExperimentConfig base = load(flags);
  const fs::path root = prepare_out(base.output.directory);
  if (repeat <= 1) return train_one(base, root, std::cout).exit_code;

  // Independent seeds, one sub-directory each.
  std::atomic<int> next{0};
  std::atomic<int> worst{kExitOk};
  std::mutex log_mutex;
  auto worker = [&] {
    for (int i = next++; i < repeat; i = next++) {
      ExperimentConfig c = base;
      c.training.rng_seed = base.training.rng_seed + static_cast<std::uint64_t>(i);
      const fs::path dir = prepare_out((root / ("seed_" + std::to_string(c.training.rng_seed))).string());
      std::ostringstream log;
      const int code = train_one(c, dir, log).exit_code;
      if (code != kExitOk) worst = code;
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cout << log.str();
    }
  };
  const int n = std::clamp(jobs, 1, repeat);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return worst;
}

// ------------------------------------------------------------- evaluate

int cmd_evaluate(const CommonFlags& flags, const std::string& weights, bool ideal) {
  ExperimentConfig cfg = load(flags);
  PipelineAdc p = cfg.make_pipeline();
  if (ideal) {
    if (cfg.converter.backend != Backend::Ideal) p = PipelineAdc(cfg.n_stages(), cfg.converter.v_fs, cfg.converter.f_s);
  } else {
    if (weights.empty()) throw UsageError("evaluate needs --weights or --ideal");
    if (!fs::exists(weights)) throw UsageError("weights file not found: " + weights);
    try {
      load_weights_file(weights, p);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  const fs::path dir = prepare_out(cfg.output.directory);
  const int n_bits = p.n_bits();

  const std::size_t ramp_n =
      cfg.metrics.ramp_points ? cfg.metrics.ramp_points : default_ramp_points(n_bits);
  ConversionStats stats;
  const auto ramp_codes = p.convert_all(linearity_ramp(ramp_n, p.v_fs), &stats);
  const LinearityReport lin = dnl_inl(ramp_codes, n_bits);

  const std::size_t n_fft = cfg.metrics.fft_length;
  std::size_t bin;
  double f_sig;
  if (cfg.metrics.hann_window) {
    bin = 0;
    f_sig = cfg.metrics.f_signal;
  } else {
    bin = coherent_bin(cfg.metrics.f_signal, p.f_s, n_fft);
    f_sig = bin_frequency(bin, p.f_s, n_fft);
  }
  std::vector<double> tone(n_fft);
  if (cfg.metrics.hann_window) {
    for (std::size_t k = 0; k < n_fft; ++k)
      tone[k] = 0.5 * p.v_fs * (1.0 + std::sin(2.0 * std::numbers::pi * f_sig * static_cast<double>(k) / p.f_s));
  } else {
    tone = sine_record(n_fft, bin, p.v_fs);
  }
  SpectrumOptions so;
  so.hann_window = cfg.metrics.hann_window;
  const SpectrumReport tone_rep = spectrum(p.convert_all(tone), n_bits, p.f_s, f_sig, so);

  PowerModel pm = cfg.power_model();
  pm.enob = tone_rep.enob;
  pm.f_conv = p.f_s;
  const std::size_t pw_n =
      cfg.metrics.power_samples ? cfg.metrics.power_samples : (std::size_t{4} << n_bits);
  const PowerReport pw = power_estimate(p, linearity_ramp(pw_n, p.v_fs), pm);
  const double fom_fmax = fom(pw.total, tone_rep.enob, cfg.metrics.f_max);

  {
    CsvWriter w(dir / "linearity.csv", {"code", "dnl_lsb", "inl_lsb"});
    for (std::size_t k = 0; k < lin.dnl.size(); ++k)
      w.row({csv_number(static_cast<std::uint64_t>(LinearityReport::code_at(k))),
             csv_number(lin.dnl[k]), csv_number(lin.inl[k])});
  }
  {
    CsvWriter w(dir / "spectrum.csv", {"bin", "freq_hz", "mag_db"});
    for (std::size_t k = 0; k <= n_fft / 2; ++k)
      w.row({csv_number(static_cast<std::uint64_t>(k)), csv_number(bin_frequency(k, p.f_s, n_fft)),
             csv_number(magnitude_dbfs(tone_rep, k))});
  }
  {
    CsvWriter w(dir / "power.csv", {"component", "watts"});
    w.row({"p_int", csv_number(pw.p_int)});
    w.row({"p_act", csv_number(pw.p_act)});
    w.row({"p_syn", csv_number(pw.p_syn)});
    w.row({"total", csv_number(pw.total)});
  }
  {
    CsvWriter w(dir / "summary.csv", {"metric", "value", "unit"});
    w.row({"n_bits", csv_number(n_bits), "bits"});
    w.row({"max_abs_dnl", csv_number(lin.max_abs_dnl), "LSB"});
    w.row({"max_abs_inl", csv_number(lin.max_abs_inl), "LSB"});
    w.row({"missing_codes", csv_number(static_cast<std::uint64_t>(lin.missing_codes.size())), "count"});
    w.row({"ramp_points", csv_number(static_cast<std::uint64_t>(ramp_n)), "count"});
    w.row({"overrange", csv_number(stats.overrange), "count"});
    w.row({"signal_freq", csv_number(f_sig), "Hz"});
    w.row({"sndr", csv_number(tone_rep.sndr_db), "dB"});
    w.row({"enob", csv_number(tone_rep.enob), "bits"});
    w.row({"power_total", csv_number(pw.total), "W"});
    w.row({"p_syn", csv_number(pw.p_syn), "W"});
    w.row({"fom_at_fs", csv_number(pw.fom_j_per_conv), "J/conv"});
    w.row({"fom_at_fmax", csv_number(fom_fmax), "J/conv"});
    w.row({"fom_at_fmax_quoted", csv_number(0.97e-15), "J/conv"});
    w.row({"f_max", csv_number(cfg.metrics.f_max), "Hz"});
  }
  if (cfg.output.svg) {
    std::vector<double> codes_x, dnl, inl;
    for (std::size_t k = 0; k < lin.dnl.size(); ++k) {
      codes_x.push_back(static_cast<double>(LinearityReport::code_at(k)));
      dnl.push_back(lin.dnl[k]);
      inl.push_back(lin.inl[k]);
    }
    write_svg(dir / "linearity.svg", "DNL / INL (LSB)", {{"dnl", codes_x, dnl}, {"inl", codes_x, inl}});
    std::vector<double> fx, mag;
    for (std::size_t k = 1; k < n_fft / 2; ++k) {
      fx.push_back(bin_frequency(k, p.f_s, n_fft));
      mag.push_back(magnitude_dbfs(tone_rep, k));
    }
    write_svg(dir / "spectrum.svg", "output spectrum (dBFS)", {{"codes", fx, mag}});
  }

  std::printf("%d-bit %s: max|DNL| %.3f LSB, max|INL| %.3f LSB, missing %zu\n", n_bits,
              ideal ? "ideal" : "trained", lin.max_abs_dnl, lin.max_abs_inl,
              lin.missing_codes.size());
  std::printf("SNDR %.2f dB, ENOB %.2f at %.1f Hz (bin %zu of %zu)\n", tone_rep.sndr_db, tone_rep.enob,
              f_sig, tone_rep.signal_bin, n_fft);
  std::printf("power %.1f uW (int %.1f, act %.1f, syn %.1f), FOM %.3g J/conv at f_s, %.3g at f_max\n",
              pw.total * 1e6, pw.p_int * 1e6, pw.p_act * 1e6, pw.p_syn * 1e6, pw.fom_j_per_conv,
              fom_fmax);
  return kExitOk;
}

// ------------------------------------------------------------ device-sim

int cmd_device_sim(const CommonFlags& flags, const std::string& program, double w0) {
  ExperimentConfig cfg = load(flags);
  if (program.empty()) throw UsageError("device-sim needs --program");
  std::ifstream in(program, std::ios::binary);
  if (!in) throw UsageError("cannot read pulse program " + program);
  std::ostringstream ss;
  ss << in.rdbuf();
  CsvTable rows;
  try {
    rows = parse_csv(ss.str());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("pulse program: ") + e.what());
  }
  std::vector<PulseSpec> pulses;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i == 0 && !r.empty() && r[0] == "amplitude_v") continue; // header
    if (r.size() != 2)
      throw UsageError("pulse program line " + std::to_string(i + 1) + ": expected amplitude_v,duration_s");
    try {
      std::size_t used_a = 0, used_d = 0;
      const double a = std::stod(r[0], &used_a);
      const double d = std::stod(r[1], &used_d);
      if (used_a != r[0].size() || used_d != r[1].size() || !std::isfinite(a) || !(d > 0.0))
        throw std::invalid_argument("bad value");
      pulses.push_back({a, d});
    } catch (const std::exception&) {
      throw UsageError("pulse program line " + std::to_string(i + 1) + ": malformed numbers");
    }
  }
  if (!(w0 >= 0.0 && w0 <= 1.0)) throw UsageError("--w0 must lie in [0, 1]");

  const fs::path dir = prepare_out(cfg.output.directory);
  CsvWriter w(dir / "trace.csv", {"time_s", "w", "resistance_ohm"});
  std::mt19937_64 rng(cfg.training.rng_seed);
  MemristorState s{w0, 0};
  double t = 0.0;
  for (const auto& pulse : pulses) {
    s = apply_pulse(cfg.device.params, s, pulse, pulse.duration / cfg.device.euler_steps, &rng);
    t += pulse.duration;
    w.row({csv_number(t), csv_number(s.w), csv_number(resistance(cfg.device.params, s))});
  }
  std::printf("%zu pulses, final w %.6f, %llu write cycles -> %s\n", pulses.size(), s.w,
              static_cast<unsigned long long>(s.write_cycles), (dir / "trace.csv").string().c_str());
  return kExitOk;
}

// ---------------------------------------------------------- scale-report

int cmd_scale_report(const std::vector<int>& bits, bool pipeline, const std::string& out,
                     const ComparisonInputs& measured) {
  std::vector<ScalingRow> rows;
  for (int n : bits) {
    if (pipeline) {
      try {
        rows.push_back(pipeline_scaling(n, kStageBits, measured.cycles_per_training, measured.endurance));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    } else {
      if (n < 4) throw UsageError("--bits must be >= 4");
      ScalingInputs in;
      in.n_bits = n;
      rows.push_back(flat_scaling(in));
    }
  }
  std::vector<ComparisonRow> cmp;
  for (const auto& c : comparison_table(measured)) {
    const bool wanted_group = pipeline ? (c.group == "flat-vs-pipeline" || c.group == "pipeline-12") : c.group == "flat";
    if (wanted_group && std::find(bits.begin(), bits.end(), c.n_bits) != bits.end()) cmp.push_back(c);
  }

  const char* arch = pipeline ? "pipeline" : "flat";
  std::printf("%-9s %4s %6s %9s %10s %8s %8s %9s %8s\n", "arch", "bits", "stages", "synapses",
              "area_um2", "GSPS", "hrs/lrs", "samples", "wearout");
  for (const auto& r : rows)
    std::printf("%-9s %4d %6d %9.0f %10.1f %8.3f %8.0f %9.0f %8.2f\n", arch, r.n_bits, r.stages,
                r.synapses, r.area_um2, r.rate_sps * 1e-9, r.hrs_lrs, r.training_samples,
                r.wearout_per_day);
  if (!cmp.empty()) std::printf("\n%s", render_comparison(cmp).c_str());

  if (!out.empty()) {
    const fs::path dir = prepare_out(out);
    {
      CsvWriter w(dir / "scaling.csv", {"architecture", "bits", "stages", "synapses", "area_um2",
                                        "rate_sps", "hrs_lrs", "levels", "training_samples",
                                        "wearout_per_day"});
      for (const auto& r : rows)
        w.row({arch, csv_number(r.n_bits), csv_number(r.stages), csv_number(r.synapses),
               csv_number(r.area_um2), csv_number(r.rate_sps), csv_number(r.hrs_lrs),
               csv_number(r.levels), csv_number(r.training_samples), csv_number(r.wearout_per_day)});
    }
    {
      CsvWriter w(dir / "comparison.csv", {"group", "parameter", "architecture", "bits", "computed",
                                           "quoted", "unit", "flag"});
      auto num = [](double v) { return std::isnan(v) ? std::string() : csv_number(v); };
      for (const auto& c : cmp)
        w.row({c.group, c.parameter, c.architecture, csv_number(c.n_bits), num(c.computed),
               num(c.quoted), c.unit, c.flag});
    }
  }
  return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Pipelined neural-network ADC simulator", "nnadc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  CommonFlags flags;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "experiment config (JSON)");
    sub->add_option("--seed", flags.seed, "override training.rng_seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", flags.out, "output directory (overrides output.directory)");
  };

  int repeat = 1;
  int jobs = 1;
  auto* train = app.add_subcommand("train", "train a pipeline from random weights");
  common(train);
  train->add_flag("--svg", flags.svg, "also write SVG plots");
  train->add_option("--repeat", repeat, "train this many consecutive seeds")->check(CLI::PositiveNumber);
  train->add_option("--jobs", jobs, "worker threads for --repeat")->check(CLI::PositiveNumber);

  std::string weights;
  bool ideal = false;
  auto* evaluate = app.add_subcommand("evaluate", "linearity, spectrum and power of a converter");
  common(evaluate);
  evaluate->add_flag("--svg", flags.svg, "also write SVG plots");
  evaluate->add_option("--weights", weights, "weights.json written by train");
  evaluate->add_flag("--ideal", ideal, "evaluate the ideal-weight converter");

  std::string program;
  double w0 = 0.5;
  auto* device = app.add_subcommand("device-sim", "apply a pulse program to one memristor");
  common(device);
  device->add_option("--program", program, "CSV of amplitude_v,duration_s rows")->required();
  device->add_option("--w0", w0, "initial state in [0, 1]");

  std::vector<int> bits{4, 8};
  bool pipeline = false;
  std::string scale_out;
  auto* scale = app.add_subcommand("scale-report", "flat vs pipelined scaling tables");
  scale->add_option("--bits", bits, "converter widths")->expected(1, -1);
  scale->add_flag("--pipeline", pipeline, "pipelined rows instead of flat");
  scale->add_option("--out", scale_out, "directory for scaling.csv and comparison.csv");
  ComparisonInputs measured;
  scale->add_option("--power", measured.pipeline_power_w, "measured 8-bit pipeline power (W)")
      ->check(CLI::PositiveNumber);
  scale->add_option("--enob", measured.pipeline_enob, "measured 8-bit ENOB")->check(CLI::PositiveNumber);
  scale->add_option("--samples-8", measured.pipeline_training_samples_8,
                    "teaching samples of an 8-bit training run")
      ->check(CLI::PositiveNumber);
  scale->add_option("--samples-12", measured.pipeline_training_samples_12,
                    "teaching samples of a 12-bit training run")
      ->check(CLI::PositiveNumber);
  scale->add_option("--cycles", measured.cycles_per_training,
                    "write pulses on the busiest device per training")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(flags, repeat, jobs);
    if (*evaluate) return cmd_evaluate(flags, weights, ideal);
    if (*device) return cmd_device_sim(flags, program, w0);
    if (*scale) return cmd_scale_report(bits, pipeline, scale_out, measured);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"nnadc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace nnadc::cli
