#include "gprdet/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"GPR buried-threat detection experiments (HOG / gprHOG)"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  app.add_option("--config", config_path, "experiment config file (key = value sections)")
      ->check(CLI::ExistingFile);
  app.add_option("--output", output_dir, "output directory (overrides config)");
  app.add_option("--seed", seed, "experiment seed (overrides config)");
  app.add_option("--jobs", jobs, "worker threads; results are identical for any value")
      ->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "generate the synthetic lane dataset");
  auto* run = app.add_subcommand("run", "run all arms x CV schemes, write ROC CSVs and report");
  auto* ablate = app.add_subcommand("ablate", "check the ablation orderings across replicates");
  for (CLI::App* sub : {synth, run, ablate}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  gprdet::ExperimentConfig config;
  try {
    config = config_path.empty() ? gprdet::default_experiment()
                                 : gprdet::load_config(config_path);
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (seed) config.seed = *seed;
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  if (synth->parsed()) return gprdet::cmd_synth(config, jobs);
  if (run->parsed()) return gprdet::cmd_run(config, jobs);
  if (ablate->parsed()) return gprdet::cmd_ablate(config, jobs);
  return 2;
}
