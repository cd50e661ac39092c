#pragma once

#include "gprdet/eval.hpp"
#include "gprdet/features.hpp"
#include "gprdet/forest.hpp"
#include "gprdet/pipeline.hpp"
#include "gprdet/preprocess.hpp"
#include "gprdet/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gprdet {

// One experimental arm: a feature configuration plus its aggregation depth.
struct ArmConfig {
  std::string name;
  GprHogConfig features;
  int top_l = 3;
};

struct EvalWindow {
  double far_lo = 0.001;
  double far_hi = 0.05;
};

// Everything one experiment needs. A single `seed` drives the whole run; the
// per-stage seeds are derived from it (see replicate_seeds).
struct ExperimentConfig {
  std::uint64_t seed = 0;
  int replicates = 1;
  std::filesystem::path output_dir = "out";
  SynthConfig synth;
  PreprocConfig preproc;
  HogConfig hog;             // base descriptor geometry shared by all arms
  int bscan_halfwidth = 10;  // base B-scan halfwidth shared by all arms
  ForestConfig forest;
  PipelineConfig pipeline;   // carries msek, prescreen and cv settings
  EvalWindow eval;
  std::vector<ArmConfig> arms;

  void validate() const;
};

// The two reference arms: HOG (normalized, no averaging, L=3) and gprHOG
// (unnormalized, 3 B-scans averaged per side, L=12).
ExperimentConfig default_experiment();

// key = value sections over the defaults; unknown keys are errors. [arm.NAME]
// sections replace the default arms.
ExperimentConfig load_config(const std::filesystem::path& path);

// Stage seeds for one dataset replicate, derived from the experiment seed so
// no two stages or replicates share an RNG stream.
struct RunSeeds {
  std::uint64_t synth = 0;
  std::uint64_t forest = 0;
  std::uint64_t cv = 0;
};

RunSeeds replicate_seeds(std::uint64_t experiment_seed, int replicate);

}  // namespace gprdet
