#pragma once

#include "gprdet/core.hpp"

#include <vector>

namespace gprdet {

struct MsekConfig {
  int smooth_halfwidth = 5;
  int max_keypoints = 10;
  int min_separation = 9;

  void validate() const;
};

struct Keypoint {
  int t_idx = 0;
  double energy = 0.0;
};

// Moving average of the squared amplitude over [t-hw, t+hw]; the window is
// truncated at the borders and divided by its actual length.
Eigen::ArrayXd smoothed_energy(Eigen::Ref<const Eigen::ArrayXd> ascan,
                               const MsekConfig& config);

// Keypoints of a background-normalized B-scan: strict interior local maxima of
// the central A-scan's smoothed energy (e[t] > e[t-1], e[t] >= e[t+1]), sorted
// by energy descending, greedily dropping maxima within min_separation of an
// accepted one, truncated to max_keypoints. Falls back to the global argmax
// (smallest index on ties) when no interior maximum exists.
std::vector<Keypoint> msek(const BScan& bscan, const MsekConfig& config);

std::vector<Keypoint> top_k(const std::vector<Keypoint>& keypoints, int k);

}  // namespace gprdet
