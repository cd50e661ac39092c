#include "gprdet/hog.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace gprdet {

void HogConfig::validate() const {
  if (cells_t < 1 || cells_x < 1) throw Error("hog: cell counts must be >= 1");
  if (patch_h != cells_t * (patch_h / cells_t))
    throw Error("hog: patch_h " + std::to_string(patch_h) + " is not divisible into " +
                std::to_string(cells_t) + " cells");
  if (patch_w != cells_x * (patch_w / cells_x))
    throw Error("hog: patch_w " + std::to_string(patch_w) + " is not divisible into " +
                std::to_string(cells_x) + " cells");
  if (n_bins < 2) throw Error("hog: n_bins must be >= 2");
  if (block_t < 1 || block_x < 1 || block_t % 2 == 0 || block_x % 2 == 0)
    throw Error("hog: block dims must be odd and >= 1 (centered blocks)");
  if (!(norm_epsilon >= 0.0)) throw Error("hog: norm_epsilon must be >= 0");
}

Gradients gradients(const Patch& patch) {
  const int h = patch.height();
  const int w = patch.width();
  if (h < 3 || w < 3)
    throw Error("hog: patch " + std::to_string(h) + "x" + std::to_string(w) +
                " too small for gradients (need >= 3x3)");
  const Eigen::ArrayXXd& img = patch.data;
  Gradients g;
  g.magnitude.resize(h, w);
  g.direction_deg.resize(h, w);
  constexpr double rad_to_deg = 180.0 / std::numbers::pi;
  for (int t = 0; t < h; ++t) {
    const int tm = t > 0 ? t - 1 : 0;
    const int tp = t < h - 1 ? t + 1 : h - 1;
    for (int x = 0; x < w; ++x) {
      const int xm = x > 0 ? x - 1 : 0;
      const int xp = x < w - 1 ? x + 1 : w - 1;
      const double gx = (img(t, xp) - img(t, xm)) / 2.0;
      const double gy = (img(tp, x) - img(tm, x)) / 2.0;
      const double mag = std::sqrt(gx * gx + gy * gy);
      g.magnitude(t, x) = mag;
      if (mag == 0.0) {
        g.direction_deg(t, x) = 0.0;
      } else {
        double deg = std::atan2(gy, gx) * rad_to_deg;
        if (deg < 0.0) deg += 180.0;
        if (deg >= 180.0) deg -= 180.0;
        g.direction_deg(t, x) = deg;
      }
    }
  }
  return g;
}

namespace {

// Nearest bin center (k * 180/n modulo 180); midpoint ties go to the lower index.
int nearest_bin(double direction_deg, int n_bins) {
  const double bin_width = 180.0 / n_bins;
  int best = 0;
  double best_dist = 180.0;
  for (int k = 0; k < n_bins; ++k) {
    const double raw = std::abs(direction_deg - k * bin_width);
    const double dist = std::min(raw, 180.0 - raw);
    if (dist < best_dist) {
      best_dist = dist;
      best = k;
    }
  }
  return best;
}

}  // namespace

CellHistGrid cell_histograms(const Gradients& grads, const HogConfig& config) {
  config.validate();
  if (grads.magnitude.rows() != config.patch_h || grads.magnitude.cols() != config.patch_w ||
      grads.direction_deg.rows() != config.patch_h ||
      grads.direction_deg.cols() != config.patch_w)
    throw Error("hog: gradient arrays do not match the configured patch size");

  CellHistGrid grid;
  grid.cells_t = config.cells_t;
  grid.cells_x = config.cells_x;
  grid.h = Eigen::ArrayXXd::Zero(config.cells_t * config.cells_x, config.n_bins);
  for (int t = 0; t < config.patch_h; ++t) {
    const int ct = t / config.cell_h();
    for (int x = 0; x < config.patch_w; ++x) {
      const int cx = x / config.cell_w();
      const int bin = nearest_bin(grads.direction_deg(t, x), config.n_bins);
      grid.h(ct * config.cells_x + cx, bin) += grads.magnitude(t, x);
    }
  }
  return grid;
}

CellHistGrid block_normalize(const CellHistGrid& grid, const HogConfig& config) {
  config.validate();
  if (grid.cells_t != config.cells_t || grid.cells_x != config.cells_x ||
      grid.n_bins() != config.n_bins)
    throw Error("hog: histogram grid does not match the config");

  CellHistGrid out = grid;
  const int ht = config.block_t / 2;
  const int hx = config.block_x / 2;
  for (int ct = 0; ct < grid.cells_t; ++ct) {
    for (int cx = 0; cx < grid.cells_x; ++cx) {
      double sq = 0.0;
      for (int bt = std::max(0, ct - ht); bt <= std::min(grid.cells_t - 1, ct + ht); ++bt)
        for (int bx = std::max(0, cx - hx); bx <= std::min(grid.cells_x - 1, cx + hx); ++bx)
          sq += grid.cell(bt, bx).square().sum();
      const double denom = std::sqrt(sq) + config.norm_epsilon;
      if (denom > 0.0)
        out.cell(ct, cx) = grid.cell(ct, cx) / denom;
      else
        out.cell(ct, cx).setZero();
    }
  }
  return out;
}

Eigen::VectorXd hog_feature(const Patch& patch, const HogConfig& config) {
  config.validate();
  if (patch.height() != config.patch_h || patch.width() != config.patch_w)
    throw Error("hog: patch is " + std::to_string(patch.height()) + "x" +
                std::to_string(patch.width()) + ", config expects " +
                std::to_string(config.patch_h) + "x" + std::to_string(config.patch_w));
  CellHistGrid grid = cell_histograms(gradients(patch), config);
  if (config.normalize) grid = block_normalize(grid, config);

  Eigen::VectorXd feat(config.feature_len());
  int i = 0;
  for (int cell = 0; cell < grid.h.rows(); ++cell)
    for (int bin = 0; bin < config.n_bins; ++bin) feat[i++] = grid.h(cell, bin);
  return feat;
}

}  // namespace gprdet
