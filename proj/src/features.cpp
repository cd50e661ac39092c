#include "gprdet/features.hpp"

#include <algorithm>
#include <string>

namespace gprdet {

void GprHogConfig::validate() const {
  hog.validate();
  if (avg_halfcount < 0) throw Error("gprhog: avg_halfcount must be >= 0");
  if (2 * bscan_halfwidth + 1 < hog.patch_w)
    throw Error("gprhog: bscan_halfwidth " + std::to_string(bscan_halfwidth) +
                " gives B-scans narrower than the " + std::to_string(hog.patch_w) +
                "-column patch");
}

Eigen::VectorXd directional_feature(const Volume& volume, int down_idx, int cross_idx,
                                    int keypoint_t, ScanDirection direction,
                                    const GprHogConfig& config) {
  config.validate();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(config.hog.feature_len());
  const int n = 2 * config.avg_halfcount + 1;
  for (int o = -config.avg_halfcount; o <= config.avg_halfcount; ++o) {
    // parallel B-scans: offset along the perpendicular axis, clamped at edges
    int d = down_idx;
    int c = cross_idx;
    if (direction == ScanDirection::DownTrack)
      c = std::clamp(cross_idx + o, 0, volume.n_cross - 1);
    else
      d = std::clamp(down_idx + o, 0, volume.n_down - 1);
    const BScan bscan = extract_bscan(volume, direction, d, c, config.bscan_halfwidth);
    const Patch patch = extract_patch(bscan, keypoint_t, config.hog.patch_h, config.hog.patch_w);
    sum += hog_feature(patch, config.hog);
  }
  return sum / n;
}

Eigen::VectorXd alarm_feature(const Volume& volume, int down_idx, int cross_idx,
                              int keypoint_t, const GprHogConfig& config) {
  Eigen::VectorXd feat(config.feature_len());
  feat.head(config.hog.feature_len()) = directional_feature(
      volume, down_idx, cross_idx, keypoint_t, ScanDirection::CrossTrack, config);
  feat.tail(config.hog.feature_len()) = directional_feature(
      volume, down_idx, cross_idx, keypoint_t, ScanDirection::DownTrack, config);
  return feat;
}

}  // namespace gprdet
