#include "nnadc/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace nnadc {

namespace {

struct StageOutput {
  Nibble code;
  double residue;
};

StageOutput run_stage(const PipelineStage& stage, double held, double v_fs,
                      ConversionStats* stats, std::mt19937_64* noise) {
  const Nibble code = stage.adc.convert(held, nullptr, noise);
  double q = 0.0;
  // The DAC output is compared with the amplified input of the stage.
  if (stage.dac)
    q = residue_clip(residue(stage.adc.input_gain * held, stage.dac->convert(code)), v_fs, stats);
  return {code, q};
}

} // namespace

PipelineAdc::PipelineAdc(int n, double v_fs_, double f_s_, Backend backend,
                         const MemristorParams& device)
    : v_fs(v_fs_), f_s(f_s_) {
  if (n < 1) throw std::invalid_argument("PipelineAdc: need at least one stage");
  stages.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    PipelineStage s{SubAdc4(v_fs, k == 0 ? 1.0 : inter_stage_gain, backend, device), {}};
    if (k + 1 < n) s.dac = Dac4(v_fs, backend, device);
    stages.push_back(std::move(s));
  }
}

double PipelineAdc::lsb() const { return v_fs / static_cast<double>(1u << n_bits()); }

int PipelineAdc::trainable_synapses() const {
  int n = 0;
  for (const auto& s : stages) {
    n += SubAdc4::trainable_synapses();
    if (s.dac) n += Dac4::trainable_synapses();
  }
  return n;
}

std::uint32_t PipelineAdc::convert_static(double v_in, ConversionStats* stats,
                                          std::mt19937_64* noise) const {
  double held = std::clamp(v_in, 0.0, v_fs);
  std::uint32_t code = 0;
  for (const auto& stage : stages) {
    const StageOutput out = run_stage(stage, held, v_fs, stats, noise);
    code = (code << kStageBits) | out.code;
    held = out.residue;
  }
  return code;
}

void PipelineAdc::convert_batch(std::span<const double> v_in, std::span<std::uint32_t> codes,
                                ConversionStats* stats, std::mt19937_64* noise) const {
  if (codes.size() != v_in.size())
    throw std::invalid_argument("convert_batch: output size mismatch");
  const bool noisy = noise != nullptr && std::any_of(stages.begin(), stages.end(), [](const auto& s) {
                       return s.adc.comparator_noise_sigma > 0.0;
                     });
  if (noisy) {
    for (std::size_t n = 0; n < v_in.size(); ++n) codes[n] = convert_static(v_in[n], stats, noise);
    return;
  }

  std::vector<double> held(v_in.size());
  std::transform(v_in.begin(), v_in.end(), held.begin(),
                 [this](double v) { return std::clamp(v, 0.0, v_fs); });
  std::vector<std::uint8_t> nibbles(v_in.size());
  std::fill(codes.begin(), codes.end(), 0u);

  for (const auto& stage : stages) {
    simd::subadc_convert_batch(stage.adc.kernel_weights(), held, nibbles);
    for (std::size_t n = 0; n < codes.size(); ++n) codes[n] = (codes[n] << kStageBits) | nibbles[n];
    if (!stage.dac) break;
    double dac_step[4];
    stage.dac->steps(dac_step);
    if (stage.adc.input_gain != 1.0)
      for (double& h : held) h = stage.adc.input_gain * h;
    const std::size_t clipped =
        simd::dac_residue_batch(dac_step, held, nibbles, v_fs / kStageCodes, held);
    if (stats) stats->overrange += clipped;
  }
}

std::vector<std::uint32_t> PipelineAdc::convert_all(std::span<const double> v_in,
                                                    ConversionStats* stats) const {
  std::vector<std::uint32_t> codes(v_in.size());
  convert_batch(v_in, codes, stats);
  return codes;
}

double residue_clip(double q, double v_fs, ConversionStats* stats) {
  const double hi = v_fs / kStageCodes;
  if (stats && (q < -simd::kTieBand || q > hi + simd::kTieBand)) ++stats->overrange;
  return std::clamp(q, 0.0, hi);
}

double ClockedFrame::held_input() const {
  return !stage_registers.empty() && stage_registers.front() ? stage_registers.front()->held
                                                             : 0.0;
}

ClockedFrame make_frame(const PipelineAdc& p) {
  ClockedFrame f;
  f.stage_registers.resize(static_cast<std::size_t>(p.n_stages()));
  return f;
}

std::optional<std::uint32_t> step(const PipelineAdc& p, ClockedFrame& frame, double sample) {
  const std::size_t n = p.stages.size();
  if (frame.stage_registers.size() != n)
    throw std::invalid_argument("step: frame does not match pipeline depth");

  std::optional<std::uint32_t> emitted;
  // Walk back to front so each stage hands its result to the register that
  // has already been emptied this cycle.
  for (std::size_t k = n; k-- > 0;) {
    auto& slot = frame.stage_registers[k];
    if (!slot) continue;
    const StageOutput out = run_stage(p.stages[k], slot->held, p.v_fs, &frame.stats, nullptr);
    const std::uint32_t partial = (slot->partial << kStageBits) | out.code;
    if (k + 1 == n) {
      emitted = partial;
    } else {
      frame.stage_registers[k + 1] = ClockedFrame::Slot{out.residue, partial};
    }
    slot.reset();
  }
  frame.stage_registers[0] = ClockedFrame::Slot{std::clamp(sample, 0.0, p.v_fs), 0u};
  ++frame.cycle_index;
  return emitted;
}

std::vector<std::uint32_t> run(const PipelineAdc& p, std::span<const double> samples,
                               ConversionStats* stats) {
  ClockedFrame frame = make_frame(p);
  std::vector<std::uint32_t> out;
  out.reserve(samples.size());
  for (double s : samples)
    if (auto code = step(p, frame, s)) out.push_back(*code);
  if (stats) stats->overrange += frame.stats.overrange;
  return out;
}

} // namespace nnadc
