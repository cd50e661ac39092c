#pragma once

#include "gprdet/core.hpp"

namespace gprdet {

struct HogConfig {
  int patch_h = 18;   // time samples
  int patch_w = 20;   // A-scans
  int cells_t = 3;
  int cells_x = 4;
  int block_t = 3;
  int block_x = 3;
  int n_bins = 9;
  bool normalize = true;
  double norm_epsilon = 1e-10;

  int cell_h() const { return patch_h / cells_t; }
  int cell_w() const { return patch_w / cells_x; }
  int feature_len() const { return cells_t * cells_x * n_bins; }
  void validate() const;
};

struct Gradients {
  Eigen::ArrayXXd magnitude;       // >= 0
  Eigen::ArrayXXd direction_deg;   // [0, 180); 0 where magnitude is 0
};

// Per-cell orientation histograms. h(cell, bin) with cell = ct * cells_x + cx.
struct CellHistGrid {
  int cells_t = 0;
  int cells_x = 0;
  Eigen::ArrayXXd h;

  int n_bins() const { return static_cast<int>(h.cols()); }
  Eigen::ArrayXXd::RowXpr cell(int ct, int cx) { return h.row(ct * cells_x + cx); }
  Eigen::ArrayXXd::ConstRowXpr cell(int ct, int cx) const { return h.row(ct * cells_x + cx); }
};

// Central differences with replicated borders; unsigned gradient directions.
Gradients gradients(const Patch& patch);

// Magnitude-weighted hard assignment to the nearest of n_bins centers at
// k * 180 / n_bins; exact midpoint ties take the lower bin index.
CellHistGrid cell_histograms(const Gradients& grads, const HogConfig& config);

// Divides each cell by the l2 norm of all entries in the block_t x block_x
// block centered on it (truncated at grid borders) plus norm_epsilon.
CellHistGrid block_normalize(const CellHistGrid& grid, const HogConfig& config);

// Full descriptor: gradients -> cell histograms -> optional block
// normalization, flattened cell-row major. Length cells_t * cells_x * n_bins.
Eigen::VectorXd hog_feature(const Patch& patch, const HogConfig& config);

}  // namespace gprdet
