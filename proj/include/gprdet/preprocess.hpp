#pragma once

#include "gprdet/core.hpp"

namespace gprdet {

struct PreprocConfig {
  int gate_t_min = 50;
  int gate_t_max = 200;        // inclusive
  int align_target_idx = 100;
  int crop_start_idx = 118;
  int crop_len = 330;
  double depth_norm_epsilon = 1e-8;

  void validate(int n_time) const;
};

// Index of the strongest absolute amplitude inside [gate_t_min, gate_t_max],
// ties broken toward the smaller index.
int estimate_ground(Eigen::Ref<const Eigen::ArrayXd> ascan, const PreprocConfig& config);

// Shifts each A-scan so its estimated ground lands on align_target_idx.
// Samples vacated by the shift are zero-filled, not wrapped.
Volume align_ground(const Volume& volume, const PreprocConfig& config);

// Keeps crop_len samples from crop_start_idx, then z-scores each time slice
// across the whole lane: x -> (x - mean_t) / (std_t + epsilon). Slices whose
// std + epsilon is zero become all zeros.
Volume crop_and_depth_normalize(const Volume& volume, const PreprocConfig& config);

// align + crop + normalize in one call.
Volume preprocess(const Volume& volume, const PreprocConfig& config);

// Subtracts each row's mean across columns (row = time index).
BScan background_normalize(const BScan& bscan);

}  // namespace gprdet
