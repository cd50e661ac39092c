#include "gprdet/keypoints.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gprdet {

void MsekConfig::validate() const {
  if (smooth_halfwidth < 1) throw Error("msek: smooth_halfwidth must be >= 1");
  if (max_keypoints < 1) throw Error("msek: max_keypoints must be >= 1");
  if (min_separation < 0) throw Error("msek: min_separation must be >= 0");
}

Eigen::ArrayXd smoothed_energy(Eigen::Ref<const Eigen::ArrayXd> ascan,
                               const MsekConfig& config) {
  config.validate();
  const int n = static_cast<int>(ascan.size());
  const int hw = config.smooth_halfwidth;
  if (n < 2 * hw + 1)
    throw Error("msek: series of " + std::to_string(n) + " samples is shorter than the " +
                std::to_string(2 * hw + 1) + "-sample smoothing window");
  const Eigen::ArrayXd sq = ascan.square();
  Eigen::ArrayXd energy(n);
  for (int t = 0; t < n; ++t) {
    const int lo = std::max(0, t - hw);
    const int hi = std::min(n - 1, t + hw);
    energy[t] = sq.segment(lo, hi - lo + 1).mean();
  }
  return energy;
}

std::vector<Keypoint> msek(const BScan& bscan, const MsekConfig& config) {
  const Eigen::ArrayXd central = bscan.data.col(bscan.central_col());
  const Eigen::ArrayXd energy = smoothed_energy(central, config);
  const int n = static_cast<int>(energy.size());

  std::vector<Keypoint> maxima;
  for (int t = 1; t + 1 < n; ++t) {
    if (energy[t] > energy[t - 1] && energy[t] >= energy[t + 1])
      maxima.push_back({t, energy[t]});
  }
  if (maxima.empty()) {
    int best = 0;
    for (int t = 1; t < n; ++t)
      if (energy[t] > energy[best]) best = t;
    return {{best, energy[best]}};
  }

  std::stable_sort(maxima.begin(), maxima.end(),
                   [](const Keypoint& a, const Keypoint& b) { return a.energy > b.energy; });
  std::vector<Keypoint> accepted;
  for (const auto& kp : maxima) {
    if (static_cast<int>(accepted.size()) >= config.max_keypoints) break;
    const bool clear = std::none_of(accepted.begin(), accepted.end(), [&](const Keypoint& a) {
      return std::abs(a.t_idx - kp.t_idx) < config.min_separation;
    });
    if (clear) accepted.push_back(kp);
  }
  return accepted;
}

std::vector<Keypoint> top_k(const std::vector<Keypoint>& keypoints, int k) {
  if (k < 0) k = 0;
  const int n = std::min<int>(k, static_cast<int>(keypoints.size()));
  return {keypoints.begin(), keypoints.begin() + n};
}

}  // namespace gprdet
