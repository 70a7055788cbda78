// Command-line harness: one subcommand per experiment kind, plus `validate`
// (parse-only) and `report` (summarize existing run summaries).  Exit code 0
// means the run completed with every built-in check passing, 1 means a check
// failed, 2 means the run itself could not be carried out.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "orbitadv/csv.hpp"
#include "orbitadv/experiment_runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const std::vector<std::pair<std::string, std::string>> kExperiments = {
    {"haar-test", "uniform rotation sampling sanity checks"},
    {"kernel-check", "empirical vs analytic kernel deviations"},
    {"balance", "sign-region masses on an orbit per network"},
    {"adv-search", "two-phase adversarial orbit search per network"},
    {"theorem-trial", "adversarial success rates over a tau ladder"},
    {"isoperimetry", "hemisphere blow-up certification benchmark"},
    {"concentration", "Lipschitz concentration tails on the rotation group"},
    {"separate", "sign separation of several orbit points"},
    {"sudakov", "expected-maximum lower-bound trend check"},
    {"sphere-tail", "sphere inner-product tail bounds"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbitadv: rotation-orbit adversarial example experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::string report_dir = "out";
  std::optional<std::uint64_t> cli_seed;
  std::optional<int> cli_workers;

  for (const auto& [name, description] : kExperiments) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "experiment config file")
        ->required();
    sub->add_option("--seed", cli_seed,
                    "master seed override (beats ORBITADV_SEED and config)");
    sub->add_option("--out", out_override, "output directory override");
    sub->add_option("--workers", cli_workers, "worker thread count override");
  }

  CLI::App* validate =
      app.add_subcommand("validate", "parse a config and report its hash");
  validate->add_option("--config", config_path, "experiment config file")
      ->required();

  CLI::App* report =
      app.add_subcommand("report", "summarize *_summary.json files");
  report->add_option("--out", report_dir, "directory holding run summaries");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    if (name == "report") {
      std::cout << orbitadv::report_table(report_dir);
      return 0;
    }

    orbitadv::ExperimentConfig config =
        orbitadv::parse_config(read_file(config_path));

    if (name == "validate") {
      std::cout << "valid " << orbitadv::experiment_kind_name(config.kind)
                << " config (hash "
                << orbitadv::fnv1a_hex(orbitadv::serialize_config(config))
                << ")\n";
      return 0;
    }

    if (orbitadv::experiment_kind_name(config.kind) != name)
      throw std::runtime_error("config declares kind '" +
                               std::string(orbitadv::experiment_kind_name(
                                   config.kind)) +
                               "' but the subcommand is '" + name + "'");

    config.seed = orbitadv::resolve_seed(config, cli_seed);
    if (sub->count("--out") > 0) config.out_dir = out_override;
    if (cli_workers) config.workers = *cli_workers;

    orbitadv::RunRecord record = orbitadv::run(config);
    std::cout << record.summary.dump(2) << "\n"
              << "csv: " << record.csv_path.string() << "\n"
              << "summary: " << record.summary_path.string() << "\n";
    return record.all_checks_passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
