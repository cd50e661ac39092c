#pragma once

#include "gprdet/config.hpp"

namespace gprdet {

// Subcommand bodies behind the CLI. Each returns a process exit code and
// reports failures on stderr.

// Writes the synthetic dataset: one seed_NNNN directory per replicate holding
// lane_NN.gprv volumes and lane_NN_truth.csv ground truth.
int cmd_synth(const ExperimentConfig& config, int jobs);

// Runs every configured arm under both CV schemes on replicate 0 and writes
// ROC/alarm CSVs plus a partial-AUC report under <output>/results/run.
int cmd_run(const ExperimentConfig& config, int jobs);

// Runs the canonical ablation arms over every seed_* replicate and prints
// ordering verdicts; exit 0 iff all expected orderings hold.
int cmd_ablate(const ExperimentConfig& config, int jobs);

}  // namespace gprdet
