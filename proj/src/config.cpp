#include "nnadc/config.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace nnadc {

using nlohmann::json;

namespace {

// Reads the keys of one JSON object and complains about any it did not ask for.
class Section {
 public:
  Section(const json& root, const std::string& name) : name_(name) {
    if (!root.contains(name)) return;
    node_ = &root.at(name);
    if (!node_->is_object()) throw ConfigError("config: section '" + name + "' must be an object");
  }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const char* key, Int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      if (v->is_number_unsigned()) {
        out = static_cast<Int>(v->get<std::uint64_t>());
      } else {
        const auto x = v->get<std::int64_t>();
        if (x < 0 && std::is_unsigned_v<Int>) fail(key, "must not be negative");
        out = static_cast<Int>(x);
      }
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  void text(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ConfigError("config: " + name_ + "." + key + ": " + why);
  }

  void finish() const {
    if (!node_) return;
    for (const auto& item : node_->items())
      if (!seen_.count(item.key()))
        throw ConfigError("config: unknown key '" + name_ + "." + item.key() + "'");
  }

 private:
  const json* take(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return nullptr;
    return &node_->at(key);
  }

  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

const char* norm_name(DacMseNorm n) { return n == DacMseNorm::Lsb ? "lsb" : "full_scale"; }

DacMseNorm parse_norm(const std::string& s) {
  if (s == "lsb") return DacMseNorm::Lsb;
  if (s == "full_scale") return DacMseNorm::FullScale;
  throw ConfigError("config: training.dac_mse_norm: expected 'lsb' or 'full_scale', got '" + s + "'");
}

json to_json(const ExperimentConfig& c) {
  const auto& d = c.device;
  const auto& t = c.training;
  const auto& m = c.metrics;
  json j;
  j["device"] = {{"v_on", d.params.v_on},
                 {"v_off", d.params.v_off},
                 {"k_on", d.params.k_on},
                 {"k_off", d.params.k_off},
                 {"alpha_on", d.params.alpha_on},
                 {"alpha_off", d.params.alpha_off},
                 {"r_on", d.params.r_on},
                 {"r_off", d.params.r_off},
                 {"thickness_um", d.params.thickness_um},
                 {"write_noise_sigma", d.params.write_noise_sigma},
                 {"write_voltage", d.write.amplitude},
                 {"write_time", d.write.duration},
                 {"read_voltage", d.read.amplitude},
                 {"read_time", d.read.duration},
                 {"euler_steps", d.euler_steps},
                 {"endurance", d.endurance}};
  j["converter"] = {{"n_bits", c.converter.n_bits},
                    {"v_fs", c.converter.v_fs},
                    {"f_s", c.converter.f_s},
                    {"backend", backend_name(c.converter.backend)},
                    {"comparator_noise_sigma", c.converter.comparator_noise_sigma}};
  j["training"] = {{"eta_adc", t.eta_adc},
                   {"eta_dac", t.eta_dac},
                   {"eta_scale_kappa", t.eta_scale_kappa},
                   {"coarse_kappa", t.coarse_kappa},
                   {"coarse_decay", t.coarse_decay},
                   {"e_threshold_adc", t.e_threshold_adc},
                   {"e_threshold_dac", t.e_threshold_dac},
                   {"max_epochs", t.max_epochs},
                   {"rng_seed", t.rng_seed},
                   {"dac_decay", t.dac_decay},
                   {"dac_mse_norm", norm_name(t.dac_mse_norm)},
                   {"dac_tracking", t.dac_tracking},
                   {"settle", t.settle},
                   {"samples_per_code", t.samples_per_code},
                   {"init_gain_lo", t.init_gain_lo},
                   {"init_gain_hi", t.init_gain_hi},
                   {"init_w_lo", t.init_w_lo},
                   {"init_w_hi", t.init_w_hi},
                   {"parallel_stages", t.parallel_stages}};
  j["metrics"] = {{"ramp_points", m.ramp_points},
                  {"fft_length", m.fft_length},
                  {"f_signal", m.f_signal},
                  {"hann_window", m.hann_window},
                  {"power_samples", m.power_samples},
                  {"p_int_per_neuron", m.p_int_per_neuron},
                  {"p_act_per_neuron", m.p_act_per_neuron},
                  {"f_max", m.f_max}};
  j["output"] = {{"directory", c.output.directory}, {"svg", c.output.svg}};
  return j;
}

} // namespace

const char* backend_name(Backend b) { return b == Backend::Ideal ? "ideal" : "memristive"; }

Backend parse_backend(const std::string& s) {
  if (s == "ideal") return Backend::Ideal;
  if (s == "memristive") return Backend::Memristive;
  throw ConfigError("config: converter.backend: expected 'ideal' or 'memristive', got '" + s + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
  if (!blank) {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
  } else {
    root = json::object();
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& item : root.items()) {
    static const std::set<std::string> sections{"device", "converter", "training", "metrics",
                                                "output"};
    if (!sections.count(item.key())) throw ConfigError("config: unknown key '" + item.key() + "'");
  }

  ExperimentConfig c;
  {
    Section s(root, "device");
    auto& d = c.device;
    s.number("v_on", d.params.v_on);
    s.number("v_off", d.params.v_off);
    s.number("k_on", d.params.k_on);
    s.number("k_off", d.params.k_off);
    s.number("alpha_on", d.params.alpha_on);
    s.number("alpha_off", d.params.alpha_off);
    s.number("r_on", d.params.r_on);
    s.number("r_off", d.params.r_off);
    s.number("thickness_um", d.params.thickness_um);
    s.number("write_noise_sigma", d.params.write_noise_sigma);
    s.number("write_voltage", d.write.amplitude);
    s.number("write_time", d.write.duration);
    s.number("read_voltage", d.read.amplitude);
    s.number("read_time", d.read.duration);
    s.integer("euler_steps", d.euler_steps);
    s.number("endurance", d.endurance);
    s.finish();
  }
  {
    Section s(root, "converter");
    auto& v = c.converter;
    s.integer("n_bits", v.n_bits);
    s.number("v_fs", v.v_fs);
    s.number("f_s", v.f_s);
    std::string backend = backend_name(v.backend);
    s.text("backend", backend);
    v.backend = parse_backend(backend);
    s.number("comparator_noise_sigma", v.comparator_noise_sigma);
    s.finish();
  }
  {
    Section s(root, "training");
    auto& t = c.training;
    s.number("eta_adc", t.eta_adc);
    s.number("eta_dac", t.eta_dac);
    s.number("eta_scale_kappa", t.eta_scale_kappa);
    s.number("coarse_kappa", t.coarse_kappa);
    s.number("coarse_decay", t.coarse_decay);
    s.number("e_threshold_adc", t.e_threshold_adc);
    s.number("e_threshold_dac", t.e_threshold_dac);
    s.integer("max_epochs", t.max_epochs);
    s.integer("rng_seed", t.rng_seed);
    s.number("dac_decay", t.dac_decay);
    std::string norm = norm_name(t.dac_mse_norm);
    s.text("dac_mse_norm", norm);
    t.dac_mse_norm = parse_norm(norm);
    s.boolean("dac_tracking", t.dac_tracking);
    s.boolean("settle", t.settle);
    s.integer("samples_per_code", t.samples_per_code);
    s.number("init_gain_lo", t.init_gain_lo);
    s.number("init_gain_hi", t.init_gain_hi);
    s.number("init_w_lo", t.init_w_lo);
    s.number("init_w_hi", t.init_w_hi);
    s.boolean("parallel_stages", t.parallel_stages);
    s.finish();
  }
  {
    Section s(root, "metrics");
    auto& m = c.metrics;
    s.integer("ramp_points", m.ramp_points);
    s.integer("fft_length", m.fft_length);
    s.number("f_signal", m.f_signal);
    s.boolean("hann_window", m.hann_window);
    s.integer("power_samples", m.power_samples);
    s.number("p_int_per_neuron", m.p_int_per_neuron);
    s.number("p_act_per_neuron", m.p_act_per_neuron);
    s.number("f_max", m.f_max);
    s.finish();
  }
  {
    Section s(root, "output");
    s.text("directory", c.output.directory);
    s.boolean("svg", c.output.svg);
    s.finish();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a64(dump_config(cfg)); }

void ExperimentConfig::validate() const {
  auto wrap = [](const char* section, auto&& f) {
    try {
      f();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + section + ": " + e.what());
    }
  };
  wrap("device", [&] { device.params.validate(); });
  if (!(device.write.duration > 0.0) || !(device.read.duration > 0.0))
    throw ConfigError("config: device: pulse times must be positive");
  if (!is_write_amplitude(device.params, device.write.amplitude))
    throw ConfigError("config: device.write_voltage does not exceed the switching thresholds");
  if (is_write_amplitude(device.params, device.read.amplitude))
    throw ConfigError("config: device.read_voltage would disturb the device state");
  if (device.euler_steps < 1) throw ConfigError("config: device.euler_steps must be >= 1");
  if (!(device.endurance >= 0.0)) throw ConfigError("config: device.endurance must be >= 0");

  const int n = converter.n_bits;
  if (n < kStageBits || n > 16 || n % kStageBits != 0)
    throw ConfigError("config: converter.n_bits must be a multiple of 4 between 4 and 16");
  if (!(converter.v_fs > 0.0) || !(converter.f_s > 0.0))
    throw ConfigError("config: converter: v_fs and f_s must be positive");
  if (!(converter.comparator_noise_sigma >= 0.0))
    throw ConfigError("config: converter.comparator_noise_sigma must be >= 0");

  wrap("training", [&] { training_config().validate(); });

  if (metrics.fft_length < 8 || (metrics.fft_length & (metrics.fft_length - 1)) != 0)
    throw ConfigError("config: metrics.fft_length must be a power of two >= 8");
  if (metrics.ramp_points != 0 && metrics.ramp_points < (std::size_t{1} << n))
    throw ConfigError("config: metrics.ramp_points must be 0 or at least 2^n_bits");
  if (!(metrics.f_signal > 0.0) || metrics.f_signal >= converter.f_s / 2)
    throw ConfigError("config: metrics.f_signal must lie in (0, f_s/2)");
  if (!(metrics.p_int_per_neuron >= 0.0) || !(metrics.p_act_per_neuron >= 0.0))
    throw ConfigError("config: metrics: neuron power must be >= 0");
  if (!(metrics.f_max > 0.0)) throw ConfigError("config: metrics.f_max must be positive");
  if (output.directory.empty()) throw ConfigError("config: output.directory must not be empty");
}

TrainingConfig ExperimentConfig::training_config() const {
  TrainingConfig t = training;
  t.v_fs = converter.v_fs;
  t.f_s = converter.f_s;
  t.write.voltage = std::abs(device.write.amplitude);
  t.write.max_time = device.write.duration;
  t.write.euler_steps = device.euler_steps;
  return t;
}

PowerModel ExperimentConfig::power_model() const {
  PowerModel m;
  m.p_int_per_neuron = metrics.p_int_per_neuron;
  m.p_act_per_neuron = metrics.p_act_per_neuron;
  return m;
}

PipelineAdc ExperimentConfig::make_pipeline() const {
  PipelineAdc p(n_stages(), converter.v_fs, converter.f_s, converter.backend, device.params);
  for (auto& s : p.stages) s.adc.comparator_noise_sigma = converter.comparator_noise_sigma;
  return p;
}

} // namespace nnadc
