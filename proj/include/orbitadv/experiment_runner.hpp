#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "orbitadv/experiment_config.hpp"

namespace orbitadv {

inline constexpr const char* kLibraryVersion = "0.1.0";

struct RunRecord {
  ExperimentConfig config;
  std::string config_hash;
  std::string version;
  std::filesystem::path csv_path;
  std::filesystem::path summary_path;
  nlohmann::ordered_json summary;
  double runtime_seconds = 0.0;
  bool all_checks_passed = false;
};

// Runs the configured experiment, writes <out>/<kind>.csv and
// <out>/<kind>_summary.json, and returns the record.  All randomness flows
// from config.seed through derived streams, so rerunning a config
// reproduces the CSV byte-for-byte.
RunRecord run(const ExperimentConfig& config);

// Master-seed resolution: CLI flag beats the ORBITADV_SEED environment
// variable, which beats the config value.
std::uint64_t resolve_seed(const ExperimentConfig& config,
                           std::optional<std::uint64_t> cli_seed);

// Summarizes existing *_summary.json files under `dir` into a comparison
// table (experiment, estimate vs bound, check outcomes).
std::string report_table(const std::filesystem::path& dir);

}  // namespace orbitadv
