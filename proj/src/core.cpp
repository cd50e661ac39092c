#include "gprdet/core.hpp"

#include <algorithm>
#include <cmath>

namespace gprdet {

const char* to_string(ScanDirection d) {
  return d == ScanDirection::DownTrack ? "down" : "cross";
}

Volume Volume::zeros(int n_down, int n_cross, int n_time, double dx_down_m,
                     double dx_cross_m, double dt_ns) {
  Volume v;
  v.n_down = n_down;
  v.n_cross = n_cross;
  v.n_time = n_time;
  v.dx_down_m = dx_down_m;
  v.dx_cross_m = dx_cross_m;
  v.dt_ns = dt_ns;
  v.data.assign(static_cast<std::size_t>(n_down) * n_cross * n_time, 0.0);
  v.validate();
  return v;
}

void Volume::validate() const {
  if (n_down < 1) throw Error("volume: n_down must be >= 1, got " + std::to_string(n_down));
  if (n_cross < 1) throw Error("volume: n_cross must be >= 1, got " + std::to_string(n_cross));
  if (n_time < 1) throw Error("volume: n_time must be >= 1, got " + std::to_string(n_time));
  auto positive_finite = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive_finite(dx_down_m))
    throw Error("volume: dx_down_m must be finite and > 0, got " + std::to_string(dx_down_m));
  if (!positive_finite(dx_cross_m))
    throw Error("volume: dx_cross_m must be finite and > 0, got " + std::to_string(dx_cross_m));
  if (!positive_finite(dt_ns))
    throw Error("volume: dt_ns must be finite and > 0, got " + std::to_string(dt_ns));
  const std::size_t expect = static_cast<std::size_t>(n_down) * n_cross * n_time;
  if (data.size() != expect)
    throw Error("volume: data length " + std::to_string(data.size()) +
                " does not match dims (expected " + std::to_string(expect) + ")");
}

BScan extract_bscan(const Volume& volume, ScanDirection direction, int down_idx,
                    int cross_idx, int half_width) {
  if (!volume.in_bounds(down_idx, cross_idx))
    throw Error("extract_bscan: center (" + std::to_string(down_idx) + ", " +
                std::to_string(cross_idx) + ") out of bounds");
  if (half_width < 0) throw Error("extract_bscan: half_width must be >= 0");

  const int n_space = 2 * half_width + 1;
  BScan out;
  out.direction = direction;
  out.down_idx = down_idx;
  out.cross_idx = cross_idx;
  out.data.resize(volume.n_time, n_space);

  for (int j = 0; j < n_space; ++j) {
    const int offset = j - half_width;
    int d = down_idx, c = cross_idx;
    if (direction == ScanDirection::DownTrack) {
      d = std::clamp(down_idx + offset, 0, volume.n_down - 1);
    } else {
      c = std::clamp(cross_idx + offset, 0, volume.n_cross - 1);
    }
    out.data.col(j) = volume.ascan(d, c);
  }
  return out;
}

Patch extract_patch(const BScan& bscan, int center_t, int h, int w) {
  const int nt = bscan.n_time();
  const int ns = bscan.n_space();
  if (h < 1 || h > nt)
    throw Error("extract_patch: h=" + std::to_string(h) + " exceeds B-scan time dim " +
                std::to_string(nt));
  if (w < 1 || w > ns)
    throw Error("extract_patch: w=" + std::to_string(w) + " exceeds B-scan space dim " +
                std::to_string(ns));

  const int t0 = std::clamp(center_t - h / 2, 0, nt - h);
  const int x0 = std::clamp(bscan.central_col() - w / 2, 0, ns - w);

  Patch p;
  p.center_t = center_t;
  p.center_x = bscan.central_col();
  p.data = bscan.data.block(t0, x0, h, w);
  return p;
}

}  // namespace gprdet
