#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orbitadv/conv_net.hpp"

namespace orbitadv {

enum class ExperimentKind {
  haar_test,
  kernel_check,
  balance,
  adv_search,
  theorem_trial,
  isoperimetry,
  concentration,
  separate,
  sudakov,
  sphere_tail,
};

const char* experiment_kind_name(ExperimentKind kind);
ExperimentKind experiment_kind_from_name(const std::string& name);

// Explicit architecture entry from dotted keys layer.N.*; the input shape of
// layer 1 is (d, n) and later shapes follow by composition.
struct LayerConfig {
  int width = 0;
  int stride = 1;
  int channels = 0;
  std::string activation = "relu";
  std::string init = "xavier";

  bool operator==(const LayerConfig&) const = default;
};

// Flat key = value experiment description.  Every field has a default;
// unknown keys are rejected.  Lists are comma-separated.  See
// parse_config for the full key set.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::haar_test;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int workers = 1;

  int d = 64;
  int n = 4;

  double tau = 8.0;
  std::vector<double> taus;  // empty = use {tau}
  int networks = 100;
  int trials = 100;
  std::uint64_t samples = 10000;

  int max_candidates = 448;
  int planes = 64;
  int rungs = 32;
  int path_steps = 32;

  int net_channels = 256;
  std::string activation = "relu";
  std::string theorem = "relu";  // odd | relu

  std::vector<int> channels = {64, 128, 256, 512};  // kernel-check grid
  std::vector<double> epsilons;  // kind-dependent default, see parse_config
  std::vector<double> t_values = {0, 8, 16, 24, 32};
  std::vector<int> m_values = {16, 64};

  int k_probe = 128;
  std::uint64_t samples_measure = 20000;
  std::uint64_t samples_blowup = 2000;

  std::vector<LayerConfig> layers;  // empty = built-in two-layer network

  bool operator==(const ExperimentConfig&) const = default;
};

// Strict parse: defaults filled, unknown keys and malformed values rejected
// with the line number and key, architecture validated.  When `epsilons` is
// absent it defaults to 0.25,0.5,1.0 for concentration and to sqrt(0.75 d),
// sqrt(d), sqrt(2 d) for isoperimetry.
ExperimentConfig parse_config(const std::string& text);

// Canonical text form; parse_config(serialize_config(c)) == c and doubles
// survive bit-exactly.
std::string serialize_config(const ExperimentConfig& config);

// The network the config describes: explicit layer.N.* entries when given,
// otherwise the built-in two-layer network at (d, n, net_channels,
// activation).
NetworkSpec build_network_spec(const ExperimentConfig& config);

}  // namespace orbitadv
