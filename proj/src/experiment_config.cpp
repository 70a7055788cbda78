#include "orbitadv/experiment_config.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "orbitadv/csv.hpp"

namespace orbitadv {

namespace {

const std::map<std::string, ExperimentKind>& kind_table() {
  static const std::map<std::string, ExperimentKind> table = {
      {"haar-test", ExperimentKind::haar_test},
      {"kernel-check", ExperimentKind::kernel_check},
      {"balance", ExperimentKind::balance},
      {"adv-search", ExperimentKind::adv_search},
      {"theorem-trial", ExperimentKind::theorem_trial},
      {"isoperimetry", ExperimentKind::isoperimetry},
      {"concentration", ExperimentKind::concentration},
      {"separate", ExperimentKind::separate},
      {"sudakov", ExperimentKind::sudakov},
      {"sphere-tail", ExperimentKind::sphere_tail},
  };
  return table;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " +
                              message);
}

template <typename T>
T parse_number(const std::string& value, int line, const std::string& key) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  std::from_chars_result r;
  if constexpr (std::is_floating_point_v<T>)
    r = std::from_chars(first, last, out);
  else
    r = std::from_chars(first, last, out, 10);
  if (r.ec != std::errc() || r.ptr != last)
    fail(line, "malformed number for '" + key + "': " + value);
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  return parts;
}

template <typename T>
std::vector<T> parse_list(const std::string& value, int line,
                          const std::string& key) {
  std::vector<T> out;
  for (const std::string& part : split_list(value))
    out.push_back(parse_number<T>(part, line, key));
  if (out.empty()) fail(line, "empty list for '" + key + "'");
  return out;
}

template <typename T>
std::string join_list(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += format_double(xs[i]);
    else
      out += std::to_string(xs[i]);
  }
  return out;
}

}  // namespace

const char* experiment_kind_name(ExperimentKind kind) {
  for (const auto& [name, k] : kind_table())
    if (k == kind) return name.c_str();
  throw std::logic_error("experiment_kind_name: unknown kind");
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  auto it = kind_table().find(name);
  if (it == kind_table().end())
    throw std::invalid_argument("unknown experiment kind: " + name);
  return it->second;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  bool epsilons_given = false;

  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string line = raw;
    if (std::size_t hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (value.empty()) fail(line_no, "empty value for '" + key + "'");

    if (key == "kind") {
      try {
        config.kind = experiment_kind_from_name(value);
      } catch (const std::invalid_argument& e) {
        fail(line_no, e.what());
      }
    } else if (key == "seed") {
      config.seed = parse_number<std::uint64_t>(value, line_no, key);
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "workers") {
      config.workers = parse_number<int>(value, line_no, key);
      if (config.workers < 1) fail(line_no, "workers must be >= 1");
    } else if (key == "d") {
      config.d = parse_number<int>(value, line_no, key);
      if (config.d < 1) fail(line_no, "d must be >= 1");
    } else if (key == "n") {
      config.n = parse_number<int>(value, line_no, key);
      if (config.n < 1) fail(line_no, "n must be >= 1");
    } else if (key == "tau") {
      config.tau = parse_number<double>(value, line_no, key);
      if (!(config.tau > 0)) fail(line_no, "tau must be positive");
    } else if (key == "taus") {
      config.taus = parse_list<double>(value, line_no, key);
    } else if (key == "networks") {
      config.networks = parse_number<int>(value, line_no, key);
      if (config.networks < 1) fail(line_no, "networks must be >= 1");
    } else if (key == "trials") {
      config.trials = parse_number<int>(value, line_no, key);
      if (config.trials < 1) fail(line_no, "trials must be >= 1");
    } else if (key == "samples") {
      config.samples = parse_number<std::uint64_t>(value, line_no, key);
      if (config.samples < 1) fail(line_no, "samples must be >= 1");
    } else if (key == "max_candidates") {
      config.max_candidates = parse_number<int>(value, line_no, key);
      if (config.max_candidates < 1)
        fail(line_no, "max_candidates must be >= 1");
    } else if (key == "planes") {
      config.planes = parse_number<int>(value, line_no, key);
      if (config.planes < 0) fail(line_no, "planes must be >= 0");
    } else if (key == "rungs") {
      config.rungs = parse_number<int>(value, line_no, key);
      if (config.rungs < 2) fail(line_no, "rungs must be >= 2");
    } else if (key == "path_steps") {
      config.path_steps = parse_number<int>(value, line_no, key);
      if (config.path_steps < 2) fail(line_no, "path_steps must be >= 2");
    } else if (key == "net_channels") {
      config.net_channels = parse_number<int>(value, line_no, key);
      if (config.net_channels < 1) fail(line_no, "net_channels must be >= 1");
    } else if (key == "activation") {
      try {
        activation_from_name(value);
      } catch (const std::invalid_argument& e) {
        fail(line_no, e.what());
      }
      config.activation = value;
    } else if (key == "theorem") {
      if (value != "odd" && value != "relu")
        fail(line_no, "theorem must be 'odd' or 'relu'");
      config.theorem = value;
    } else if (key == "channels") {
      config.channels = parse_list<int>(value, line_no, key);
    } else if (key == "epsilons") {
      config.epsilons = parse_list<double>(value, line_no, key);
      epsilons_given = true;
    } else if (key == "t_values") {
      config.t_values = parse_list<double>(value, line_no, key);
    } else if (key == "m_values") {
      config.m_values = parse_list<int>(value, line_no, key);
    } else if (key == "k_probe") {
      config.k_probe = parse_number<int>(value, line_no, key);
      if (config.k_probe < 1) fail(line_no, "k_probe must be >= 1");
    } else if (key == "samples_measure") {
      config.samples_measure = parse_number<std::uint64_t>(value, line_no, key);
    } else if (key == "samples_blowup") {
      config.samples_blowup = parse_number<std::uint64_t>(value, line_no, key);
    } else if (key.rfind("layer.", 0) == 0) {
      std::size_t dot = key.find('.', 6);
      if (dot == std::string::npos)
        fail(line_no, "layer keys look like layer.N.field");
      int index = parse_number<int>(key.substr(6, dot - 6), line_no, key);
      if (index < 1) fail(line_no, "layer indices start at 1");
      const std::string field = key.substr(dot + 1);
      if (static_cast<std::size_t>(index) > config.layers.size())
        config.layers.resize(index);
      LayerConfig& layer = config.layers[index - 1];
      if (field == "width")
        layer.width = parse_number<int>(value, line_no, key);
      else if (field == "stride")
        layer.stride = parse_number<int>(value, line_no, key);
      else if (field == "channels")
        layer.channels = parse_number<int>(value, line_no, key);
      else if (field == "activation")
        layer.activation = value;
      else if (field == "init")
        layer.init = value;
      else
        fail(line_no, "unknown layer field '" + field + "'");
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }

  if (!epsilons_given) {
    if (config.kind == ExperimentKind::concentration)
      config.epsilons = {0.25, 0.5, 1.0};
    else if (config.kind == ExperimentKind::isoperimetry)
      config.epsilons = {std::sqrt(0.75 * config.d),
                         std::sqrt(1.0 * config.d),
                         std::sqrt(2.0 * config.d)};
  }

  // Architectural sanity is a parse-time concern: a config that cannot
  // describe a network is rejected here, not at run time.
  build_network_spec(config);
  return config;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  auto emit = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  emit("kind", experiment_kind_name(c.kind));
  emit("seed", std::to_string(c.seed));
  emit("out", c.out_dir);
  emit("workers", std::to_string(c.workers));
  emit("d", std::to_string(c.d));
  emit("n", std::to_string(c.n));
  emit("tau", format_double(c.tau));
  if (!c.taus.empty()) emit("taus", join_list(c.taus));
  emit("networks", std::to_string(c.networks));
  emit("trials", std::to_string(c.trials));
  emit("samples", std::to_string(c.samples));
  emit("max_candidates", std::to_string(c.max_candidates));
  emit("planes", std::to_string(c.planes));
  emit("rungs", std::to_string(c.rungs));
  emit("path_steps", std::to_string(c.path_steps));
  emit("net_channels", std::to_string(c.net_channels));
  emit("activation", c.activation);
  emit("theorem", c.theorem);
  emit("channels", join_list(c.channels));
  if (!c.epsilons.empty()) emit("epsilons", join_list(c.epsilons));
  emit("t_values", join_list(c.t_values));
  emit("m_values", join_list(c.m_values));
  emit("k_probe", std::to_string(c.k_probe));
  emit("samples_measure", std::to_string(c.samples_measure));
  emit("samples_blowup", std::to_string(c.samples_blowup));
  for (std::size_t i = 0; i < c.layers.size(); ++i) {
    const std::string prefix = "layer." + std::to_string(i + 1) + ".";
    emit(prefix + "width", std::to_string(c.layers[i].width));
    emit(prefix + "stride", std::to_string(c.layers[i].stride));
    emit(prefix + "channels", std::to_string(c.layers[i].channels));
    emit(prefix + "activation", c.layers[i].activation);
    emit(prefix + "init", c.layers[i].init);
  }
  return out;
}

NetworkSpec build_network_spec(const ExperimentConfig& config) {
  if (config.layers.empty())
    return make_two_layer_spec(config.d, config.n, config.net_channels,
                               activation_from_name(config.activation));
  NetworkSpec spec;
  int in_channels = config.d;
  int in_positions = config.n;
  for (const LayerConfig& layer : config.layers) {
    ConvLayerSpec cl;
    cl.in_channels = in_channels;
    cl.in_positions = in_positions;
    cl.width = layer.width;
    cl.stride = layer.stride;
    cl.out_channels = layer.channels;
    cl.activation = activation_from_name(layer.activation);
    if (layer.init == "xavier")
      cl.init = InitKind::xavier_gaussian;
    else if (layer.init == "row-orthonormal")
      cl.init = InitKind::row_orthonormal;
    else
      throw std::invalid_argument("unknown init kind: " + layer.init);
    cl.validate();
    spec.layers.push_back(cl);
    in_channels = cl.out_channels;
    in_positions = cl.out_positions();
  }
  spec.validate();
  return spec;
}

}  // namespace orbitadv
