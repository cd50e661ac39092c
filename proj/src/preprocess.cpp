#include "gprdet/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gprdet {

void PreprocConfig::validate(int n_time) const {
  if (gate_t_min < 0 || gate_t_max >= n_time || gate_t_min > gate_t_max)
    throw Error("preprocess: ground gate [" + std::to_string(gate_t_min) + ", " +
                std::to_string(gate_t_max) + "] not within [0, " + std::to_string(n_time) + ")");
  if (align_target_idx < 0 || align_target_idx >= n_time)
    throw Error("preprocess: align_target_idx out of range");
  if (crop_len < 1 || crop_start_idx < 0 || crop_start_idx + crop_len > n_time)
    throw Error("preprocess: crop window [" + std::to_string(crop_start_idx) + ", " +
                std::to_string(crop_start_idx + crop_len) + ") exceeds " +
                std::to_string(n_time) + " time samples");
  if (!(depth_norm_epsilon >= 0.0))
    throw Error("preprocess: depth_norm_epsilon must be >= 0");
}

int estimate_ground(Eigen::Ref<const Eigen::ArrayXd> ascan, const PreprocConfig& config) {
  int best = config.gate_t_min;
  double best_abs = std::abs(ascan[config.gate_t_min]);
  for (int t = config.gate_t_min + 1; t <= config.gate_t_max; ++t) {
    const double a = std::abs(ascan[t]);
    if (a > best_abs) {
      best_abs = a;
      best = t;
    }
  }
  return best;
}

Volume align_ground(const Volume& volume, const PreprocConfig& config) {
  volume.validate();
  config.validate(volume.n_time);
  Volume out = Volume::zeros(volume.n_down, volume.n_cross, volume.n_time, volume.dx_down_m,
                             volume.dx_cross_m, volume.dt_ns);
  const int nt = volume.n_time;
  for (int d = 0; d < volume.n_down; ++d) {
    for (int c = 0; c < volume.n_cross; ++c) {
      auto src = volume.ascan(d, c);
      const int shift = config.align_target_idx - estimate_ground(src, config);
      double* dst = &out.data[out.offset(d, c, 0)];
      const int src_lo = std::max(0, -shift);
      const int src_hi = std::min(nt, nt - shift);
      for (int t = src_lo; t < src_hi; ++t) dst[t + shift] = src[t];
    }
  }
  return out;
}

Volume crop_and_depth_normalize(const Volume& volume, const PreprocConfig& config) {
  volume.validate();
  config.validate(volume.n_time);
  Volume out = Volume::zeros(volume.n_down, volume.n_cross, config.crop_len, volume.dx_down_m,
                             volume.dx_cross_m, volume.dt_ns);
  const int n_scans = volume.n_down * volume.n_cross;
  for (int s = 0; s < n_scans; ++s) {
    const double* src = &volume.data[static_cast<std::size_t>(s) * volume.n_time +
                                     config.crop_start_idx];
    double* dst = &out.data[static_cast<std::size_t>(s) * config.crop_len];
    std::copy(src, src + config.crop_len, dst);
  }

  // two-pass statistics per slice so the result is schedule independent
  for (int t = 0; t < config.crop_len; ++t) {
    double mean = 0.0;
    for (int s = 0; s < n_scans; ++s) mean += out.data[static_cast<std::size_t>(s) * config.crop_len + t];
    mean /= n_scans;
    double var = 0.0;
    for (int s = 0; s < n_scans; ++s) {
      const double dev = out.data[static_cast<std::size_t>(s) * config.crop_len + t] - mean;
      var += dev * dev;
    }
    const double denom = std::sqrt(var / n_scans) + config.depth_norm_epsilon;
    for (int s = 0; s < n_scans; ++s) {
      double& x = out.data[static_cast<std::size_t>(s) * config.crop_len + t];
      x = denom > 0.0 ? (x - mean) / denom : 0.0;
    }
  }
  return out;
}

Volume preprocess(const Volume& volume, const PreprocConfig& config) {
  return crop_and_depth_normalize(align_ground(volume, config), config);
}

BScan background_normalize(const BScan& bscan) {
  BScan out = bscan;
  out.data.colwise() -= bscan.data.rowwise().mean();
  return out;
}

}  // namespace gprdet
