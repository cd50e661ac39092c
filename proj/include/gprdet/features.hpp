#pragma once

#include "gprdet/core.hpp"
#include "gprdet/hog.hpp"

namespace gprdet {

// Per-alarm descriptor assembly: dual-direction HOG concatenation plus the
// optional multi-B-scan feature averaging. avg_halfcount = 0 with
// hog.normalize = true gives the plain HOG baseline; avg_halfcount = 3 with
// hog.normalize = false gives the full gprHOG variant.
struct GprHogConfig {
  HogConfig hog;
  int avg_halfcount = 0;
  int bscan_halfwidth = 10;  // columns on each side of the central A-scan

  int feature_len() const { return 2 * hog.feature_len(); }
  void validate() const;
};

// Mean HOG feature over the 2 * avg_halfcount + 1 parallel B-scans around the
// alarm (offsets along the axis perpendicular to `direction`, clamped at lane
// edges), each sliced into a patch at keypoint_t.
Eigen::VectorXd directional_feature(const Volume& volume, int down_idx, int cross_idx,
                                    int keypoint_t, ScanDirection direction,
                                    const GprHogConfig& config);

// [cross-track feature ‖ down-track feature]; length 2 * 108 under defaults.
Eigen::VectorXd alarm_feature(const Volume& volume, int down_idx, int cross_idx,
                              int keypoint_t, const GprHogConfig& config);

}  // namespace gprdet
