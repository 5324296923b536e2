#pragma once

// Closed-form cost model of a flat N-bit neural ADC and of a pipeline of
// small cores, plus the flat-vs-pipelined comparison rows.

#include <string>
#include <utility>
#include <vector>

namespace nnadc {

/// Neuron delay t_p and 1/BW such that a 4-bit core runs at r4 and an 8-bit
/// flat converter at r8 (both in samples/s).
std::pair<double, double> solve_timing(double r4 = 1.66e9, double r8 = 0.74e9);

struct ScalingInputs {
  int n_bits = 4;
  double t_p = solve_timing().first;
  double bw = 1.0 / solve_timing().second;
  double v_dd = 3.6; // rail-to-rail span, twice the full scale
  double v_fs = 1.8;
  double base_samples = 4000.0;
  double base_wearout = 150.0;

  void validate() const;
};

struct ScalingRow {
  int n_bits = 0;
  int stages = 1;
  double synapses = 0.0;
  double area_um2 = 0.0;
  double rate_sps = 0.0;
  double hrs_lrs = 0.0;
  double levels = 0.0;
  double training_samples = 0.0;
  double wearout_per_day = 0.0;
};

ScalingRow flat_scaling(const ScalingInputs& inp);

/// K = n_total_bits / stage_bits cores of stage_bits each, a DAC per core but
/// the last. Stages train in parallel so training samples take the max over
/// cores; wearout comes from cycles_per_training write pulses on the busiest
/// device. Throws std::invalid_argument when the width does not divide.
ScalingRow pipeline_scaling(int n_total_bits, int stage_bits = 4,
                            double cycles_per_training = 400.0, double endurance = 8e7,
                            const ScalingInputs& base = {});

/// Training time of `samples` teaching points at f_s, in milliseconds.
double training_time_ms(double samples, double f_s);

/// Measured quantities that feed the comparison. The defaults are the reported
/// operating point, so rows built from them agree by construction until
/// measured values are passed in.
struct ComparisonInputs {
  double pipeline_power_w = 272e-6;
  double pipeline_enob = 7.6;
  double f_s = 1e5;
  double pipeline_training_samples_8 = 40000.0;
  double pipeline_training_samples_12 = 200000.0;
  double cycles_per_training = 400.0;
  double endurance = 8e7;
  ScalingInputs base;
};

struct ComparisonRow {
  std::string group;       // "flat", "flat-vs-pipeline" or "pipeline-12"
  std::string parameter;
  std::string architecture; // "flat" or "pipeline"
  int n_bits = 0;
  double computed = 0.0;    // NaN when there is nothing to compute
  double quoted = 0.0;      // NaN when no value is quoted
  std::string unit;
  std::string flag;         // "match", "differs" or "quoted only"
};

/// Relative agreement inside which a computed cell counts as a match.
inline constexpr double kComparisonTolerance = 0.05;

std::vector<ComparisonRow> comparison_table(const ComparisonInputs& in = {});

/// Fixed-width text rendering of comparison rows.
std::string render_comparison(const std::vector<ComparisonRow>& rows);

} // namespace nnadc
