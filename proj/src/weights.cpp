#include "nnadc/weights.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nnadc {

using nlohmann::json;

namespace {

json synapse_json(const Synapse& s) {
  if (const auto* g = std::get_if<IdealGain>(&s.backend)) return g->value;
  const auto& m = std::get<MemristiveGain>(s.backend);
  return {{"w", m.device.w}, {"write_cycles", m.device.write_cycles}, {"sign", m.sign},
          {"r_f", m.r_f}};
}

void read_synapse(const json& j, Synapse& s) {
  if (auto* g = std::get_if<IdealGain>(&s.backend)) {
    if (!j.is_number()) throw std::invalid_argument("weights: ideal synapse must be a number");
    g->value = j.get<double>();
    return;
  }
  if (!j.is_object()) throw std::invalid_argument("weights: memristive synapse must be an object");
  auto& m = std::get<MemristiveGain>(s.backend);
  m.device.w = j.at("w").get<double>();
  m.device.write_cycles = j.at("write_cycles").get<std::uint64_t>();
  m.sign = j.at("sign").get<int>();
  m.r_f = j.at("r_f").get<double>();
  if (!(m.device.w >= 0.0 && m.device.w <= 1.0) || (m.sign != 1 && m.sign != -1))
    throw std::invalid_argument("weights: memristive state out of range");
}

Phase parse_phase(const std::string& s) {
  for (Phase p : {Phase::DacTraining, Phase::AdcTraining, Phase::Operational})
    if (s == phase_name(p)) return p;
  throw std::invalid_argument("weights: unknown phase '" + s + "'");
}

} // namespace

std::string dump_weights(const PipelineAdc& p, Phase phase) {
  const bool mem = !p.stages.empty() && p.stages.front().adc.backend() == Backend::Memristive;
  json stages = json::array();
  for (const auto& st : p.stages) {
    json s;
    s["input_gain"] = st.adc.input_gain;
    json bias = json::array();
    for (const auto& b : st.adc.bias) bias.push_back(synapse_json(b));
    s["bias"] = bias;
    json fb = json::array();
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        fb.push_back({{"i", i}, {"j", j}, {"synapse", synapse_json(st.adc.feedback[i][j])}});
    s["feedback"] = fb;
    if (st.dac) {
      json dac = json::array();
      for (const auto& w : st.dac->weights) dac.push_back(synapse_json(w));
      s["dac"] = dac;
    }
    stages.push_back(s);
  }
  json root = {{"format", "nnadc-weights"},
               {"version", kWeightsFormatVersion},
               {"backend", mem ? "memristive" : "ideal"},
               {"phase", phase_name(phase)},
               {"n_bits", p.n_bits()},
               {"v_fs", p.v_fs},
               {"f_s", p.f_s},
               {"stages", stages}};
  return root.dump(2) + "\n";
}

Phase load_weights(PipelineAdc& p, const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("weights: malformed JSON: ") + e.what());
  }
  try {
    if (root.at("format").get<std::string>() != "nnadc-weights")
      throw std::invalid_argument("weights: not a weights file");
    if (root.at("version").get<int>() != kWeightsFormatVersion)
      throw std::invalid_argument("weights: unsupported version");
    if (root.at("n_bits").get<int>() != p.n_bits())
      throw std::invalid_argument("weights: file holds a " +
                                  std::to_string(root.at("n_bits").get<int>()) +
                                  "-bit converter, config asks for " + std::to_string(p.n_bits()));
    const std::string backend = root.at("backend").get<std::string>();
    const bool mem = p.stages.front().adc.backend() == Backend::Memristive;
    if (backend != (mem ? "memristive" : "ideal"))
      throw std::invalid_argument("weights: backend '" + backend + "' does not match the config");
    const json& stages = root.at("stages");
    if (!stages.is_array() || stages.size() != p.stages.size())
      throw std::invalid_argument("weights: stage count mismatch");
    for (std::size_t k = 0; k < p.stages.size(); ++k) {
      const json& s = stages[k];
      auto& st = p.stages[k];
      const json& bias = s.at("bias");
      if (bias.size() != 4) throw std::invalid_argument("weights: need four biases");
      for (int i = 0; i < 4; ++i) read_synapse(bias[i], st.adc.bias[i]);
      const json& fb = s.at("feedback");
      if (fb.size() != 6) throw std::invalid_argument("weights: need six feedback synapses");
      for (const auto& f : fb) {
        const int i = f.at("i").get<int>();
        const int j = f.at("j").get<int>();
        if (i < 0 || j <= i || j > 3) throw std::invalid_argument("weights: bad feedback index");
        read_synapse(f.at("synapse"), st.adc.feedback[i][j]);
      }
      if (st.dac) {
        const json& dac = s.at("dac");
        if (dac.size() != 4) throw std::invalid_argument("weights: need four DAC synapses");
        for (int i = 0; i < 4; ++i) read_synapse(dac[i], st.dac->weights[i]);
      } else if (s.contains("dac")) {
        throw std::invalid_argument("weights: last stage cannot carry a DAC");
      }
    }
    return parse_phase(root.at("phase").get<std::string>());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("weights: ") + e.what());
  }
}

void save_weights_file(const std::filesystem::path& path, const PipelineAdc& p, Phase phase) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump_weights(p, phase);
}

Phase load_weights_file(const std::filesystem::path& path, PipelineAdc& p) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("weights: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_weights(p, ss.str());
}

} // namespace nnadc
