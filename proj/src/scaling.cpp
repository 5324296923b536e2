#include "nnadc/scaling.hpp"

#include "nnadc/metrics.hpp"
#include "nnadc/training.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace nnadc {

std::pair<double, double> solve_timing(double r4, double r8) {
  // 4 t_p + 3 tau = 1/r4 and 8 t_p + 7 tau = 1/r8.
  const double a = 1.0 / r4;
  const double b = 1.0 / r8;
  const double tau = b - 2.0 * a;
  const double t_p = (a - 3.0 * tau) / 4.0;
  return {t_p, tau};
}

void ScalingInputs::validate() const {
  if (n_bits < 4) throw std::invalid_argument("scaling: n_bits must be >= 4");
  if (!(t_p > 0.0) || !(bw > 0.0)) throw std::invalid_argument("scaling: t_p and bw must be positive");
  if (!(v_dd > 0.0) || !(v_fs > 0.0)) throw std::invalid_argument("scaling: voltages must be positive");
}

ScalingRow flat_scaling(const ScalingInputs& inp) {
  inp.validate();
  const double n = inp.n_bits;
  const double spread = 2.0 - std::exp2(1.0 - n / 4.0);
  ScalingRow r;
  r.n_bits = inp.n_bits;
  r.synapses = n * (n + 1.0) / 2.0;
  r.area_um2 = n * (1.1 * n + 1250.0);
  r.rate_sps = 1.0 / (n * inp.t_p + (n - 1.0) / inp.bw);
  r.hrs_lrs = std::exp2(n - 1.0 + std::log2(inp.v_dd / inp.v_fs));
  r.levels = n * std::exp2(n);
  r.training_samples = spread * inp.base_samples;
  r.wearout_per_day = inp.base_wearout / spread;
  return r;
}

ScalingRow pipeline_scaling(int n_total_bits, int stage_bits, double cycles_per_training,
                            double endurance, const ScalingInputs& base) {
  if (stage_bits < 4 || n_total_bits < stage_bits || n_total_bits % stage_bits != 0)
    throw std::invalid_argument("pipeline_scaling: " + std::to_string(n_total_bits) +
                                " bits is not a multiple of the " + std::to_string(stage_bits) +
                                "-bit stage");
  ScalingInputs core_in = base;
  core_in.n_bits = stage_bits;
  const ScalingRow core = flat_scaling(core_in);
  const int k = n_total_bits / stage_bits;

  ScalingRow r = core;
  r.n_bits = n_total_bits;
  r.stages = k;
  // Each DAC carries one synapse per bit of its core.
  r.synapses = k * core.synapses + (k - 1) * stage_bits;
  r.area_um2 = k * core.area_um2;
  if (k > 1) r.wearout_per_day = wearout(endurance, cycles_per_training).trainings_per_day;
  return r;
}

double training_time_ms(double samples, double f_s) {
  if (!(f_s > 0.0)) throw std::invalid_argument("training_time_ms: f_s must be positive");
  return 1e3 * samples / f_s;
}

namespace {

constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

ComparisonRow row(const char* group, const char* parameter, const char* arch, int bits,
                  double computed, double quoted, const char* unit) {
  ComparisonRow r{group, parameter, arch, bits, computed, quoted, unit, ""};
  if (std::isnan(computed)) {
    r.flag = "quoted only";
  } else if (std::isnan(quoted)) {
    r.flag = "computed only";
  } else {
    const double rel = std::abs(computed - quoted) / std::max(std::abs(quoted), 1e-300);
    r.flag = rel <= kComparisonTolerance ? "match" : "differs";
  }
  return r;
}

} // namespace

std::vector<ComparisonRow> comparison_table(const ComparisonInputs& in) {
  std::vector<ComparisonRow> rows;

  struct Quoted {
    int bits;
    double synapses, area, gsps, power_uw, fom_fj, hrs, levels, samples, wearout;
  };
  const Quoted flat_cells[] = {{4, 10, 4850, 1.66, 100, 8.25, 16, 64, 4000, 150},
                           {8, 36, 9740, 0.74, 650, 7.5, 256, 2048, 6000, 100}};
  for (const auto& q : flat_cells) {
    ScalingInputs si = in.base;
    si.n_bits = q.bits;
    const ScalingRow f = flat_scaling(si);
    const double fom_fj = 1e15 * fom(q.power_uw * 1e-6, q.bits - 0.3, f.rate_sps);
    rows.push_back(row("flat", "synapses", "flat", q.bits, f.synapses, q.synapses, "count"));
    rows.push_back(row("flat", "area", "flat", q.bits, f.area_um2, q.area, "um2"));
    rows.push_back(row("flat", "conversion rate", "flat", q.bits, f.rate_sps * 1e-9, q.gsps, "GSPS"));
    rows.push_back(row("flat", "power", "flat", q.bits, kNone, q.power_uw, "uW"));
    rows.push_back(row("flat", "fom", "flat", q.bits, fom_fj, q.fom_fj, "fJ/conv"));
    rows.push_back(row("flat", "hrs/lrs", "flat", q.bits, f.hrs_lrs, q.hrs, "ratio"));
    rows.push_back(row("flat", "levels", "flat", q.bits, f.levels, q.levels, "count"));
    rows.push_back(row("flat", "training samples", "flat", q.bits, f.training_samples, q.samples,
                       "count"));
    rows.push_back(row("flat", "wearout", "flat", q.bits, f.wearout_per_day, q.wearout, "per day"));
  }

  ScalingInputs s8 = in.base;
  s8.n_bits = 8;
  const ScalingRow flat8 = flat_scaling(s8);
  const ScalingRow pipe8 =
      pipeline_scaling(8, 4, in.cycles_per_training, in.endurance, in.base);
  // The flat reference is scaled to 4x training samples.
  const double flat_samples = 4.0 * flat8.training_samples;
  rows.push_back(row("flat-vs-pipeline", "synapses", "flat", 8, flat8.synapses, 36, "count"));
  rows.push_back(row("flat-vs-pipeline", "synapses", "pipeline", 8, pipe8.synapses, 24, "count"));
  rows.push_back(row("flat-vs-pipeline", "hrs/lrs", "flat", 8, flat8.hrs_lrs, 256, "ratio"));
  rows.push_back(row("flat-vs-pipeline", "hrs/lrs", "pipeline", 8, pipe8.hrs_lrs, 16, "ratio"));
  rows.push_back(row("flat-vs-pipeline", "max conversion rate", "flat", 8, flat8.rate_sps * 1e-9, 0.74, "GSPS"));
  rows.push_back(
      row("flat-vs-pipeline", "max conversion rate", "pipeline", 8, pipe8.rate_sps * 1e-9, 1.66, "GSPS"));
  rows.push_back(row("flat-vs-pipeline", "power", "flat", 8, kNone, 650, "uW"));
  rows.push_back(row("flat-vs-pipeline", "power", "pipeline", 8, in.pipeline_power_w * 1e6, 272, "uW"));
  rows.push_back(row("flat-vs-pipeline", "fom", "flat", 8, 1e15 * fom(650e-6, 7.7, flat8.rate_sps), 7.5,
                     "fJ/conv"));
  rows.push_back(row("flat-vs-pipeline", "fom at f_max", "pipeline", 8,
                     1e15 * fom(in.pipeline_power_w, in.pipeline_enob, pipe8.rate_sps), 0.97,
                     "fJ/conv"));
  rows.push_back(row("flat-vs-pipeline", "training time", "flat", 8, training_time_ms(flat_samples, in.f_s),
                     1060, "ms"));
  rows.push_back(row("flat-vs-pipeline", "training time", "pipeline", 8,
                     training_time_ms(in.pipeline_training_samples_8, in.f_s), 400, "ms"));
  rows.push_back(row("flat-vs-pipeline", "wearout", "flat", 8, flat8.wearout_per_day / 4.0, 25, "per day"));
  rows.push_back(row("flat-vs-pipeline", "wearout", "pipeline", 8, pipe8.wearout_per_day, 55, "per day"));

  const ScalingRow pipe12 =
      pipeline_scaling(12, 4, in.cycles_per_training, in.endurance, in.base);
  rows.push_back(row("pipeline-12", "synapses", "pipeline", 12, pipe12.synapses, 38, "count"));
  rows.push_back(row("pipeline-12", "samples per epoch", "pipeline", 12,
                     make_ramp_dataset(12, in.base.v_fs).samples.size(), 4096, "count"));
  rows.push_back(row("pipeline-12", "max dnl", "pipeline", 12, kNone, 0.61, "LSB"));
  rows.push_back(row("pipeline-12", "max inl", "pipeline", 12, kNone, 0.60, "LSB"));
  rows.push_back(row("pipeline-12", "training time", "pipeline", 12,
                     training_time_ms(in.pipeline_training_samples_12, in.f_s), 2000, "ms"));
  return rows;
}

std::string render_comparison(const std::vector<ComparisonRow>& rows) {
  std::string out;
  char line[200];
  std::snprintf(line, sizeof line, "%-16s %-20s %-9s %4s %12s %12s %-8s %s\n", "group",
                "parameter", "arch", "bits", "computed", "quoted", "unit", "flag");
  out += line;
  auto cell = [](double v) {
    char b[32];
    if (std::isnan(v)) return std::string("-");
    std::snprintf(b, sizeof b, "%.4g", v);
    return std::string(b);
  };
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-16s %-20s %-9s %4d %12s %12s %-8s %s\n", r.group.c_str(),
                  r.parameter.c_str(), r.architecture.c_str(), r.n_bits, cell(r.computed).c_str(),
                  cell(r.quoted).c_str(), r.unit.c_str(), r.flag.c_str());
    out += line;
  }
  return out;
}

} // namespace nnadc
