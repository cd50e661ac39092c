#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gprdet/hog.hpp"

using namespace gprdet;

namespace {

Patch make_patch(int h, int w) {
  Patch p;
  p.data = Eigen::ArrayXXd::Zero(h, w);
  p.center_t = h / 2;
  p.center_x = w / 2;
  return p;
}

Patch random_patch(int h, int w, unsigned seed) {
  Patch p = make_patch(h, w);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> amp(-2.0, 2.0);
  for (int t = 0; t < h; ++t)
    for (int x = 0; x < w; ++x) p.data(t, x) = amp(rng);
  return p;
}

// sixteenths stay exact under shifts and power-of-two scaling
Patch dyadic_patch(int h, int w, unsigned seed) {
  Patch p = make_patch(h, w);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> q(-64, 64);
  for (int t = 0; t < h; ++t)
    for (int x = 0; x < w; ++x) p.data(t, x) = q(rng) / 16.0;
  return p;
}

Gradients oracle_gradients(const Patch& p) {
  const int h = p.height(), w = p.width();
  Gradients g;
  g.magnitude.resize(h, w);
  g.direction_deg.resize(h, w);
  for (int t = 0; t < h; ++t)
    for (int x = 0; x < w; ++x) {
      const double gx = (p.data(t, std::min(x + 1, w - 1)) - p.data(t, std::max(x - 1, 0))) / 2.0;
      const double gy = (p.data(std::min(t + 1, h - 1), x) - p.data(std::max(t - 1, 0), x)) / 2.0;
      g.magnitude(t, x) = std::hypot(gx, gy);
      double deg = g.magnitude(t, x) == 0.0 ? 0.0 : std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      while (deg < 0.0) deg += 180.0;
      while (deg >= 180.0) deg -= 180.0;
      g.direction_deg(t, x) = deg;
    }
  return g;
}

int oracle_bin(double deg, int n_bins) {
  std::vector<double> dist(n_bins);
  for (int k = 0; k < n_bins; ++k) {
    const double raw = std::fabs(deg - 180.0 * k / n_bins);
    dist[k] = std::min(raw, 180.0 - raw);
  }
  int best = 0;
  for (int k = 1; k < n_bins; ++k)
    if (dist[k] < dist[best]) best = k;
  return best;
}

Eigen::ArrayXXd oracle_histograms(const Gradients& g, const HogConfig& cfg) {
  Eigen::ArrayXXd h = Eigen::ArrayXXd::Zero(cfg.cells_t * cfg.cells_x, cfg.n_bins);
  for (int t = 0; t < cfg.patch_h; ++t)
    for (int x = 0; x < cfg.patch_w; ++x)
      h((t / cfg.cell_h()) * cfg.cells_x + x / cfg.cell_w(),
        oracle_bin(g.direction_deg(t, x), cfg.n_bins)) += g.magnitude(t, x);
  return h;
}

Eigen::ArrayXXd oracle_normalize(const Eigen::ArrayXXd& h, const HogConfig& cfg) {
  Eigen::ArrayXXd out = h;
  for (int ct = 0; ct < cfg.cells_t; ++ct)
    for (int cx = 0; cx < cfg.cells_x; ++cx) {
      std::vector<double> block;
      for (int bt = ct - cfg.block_t / 2; bt <= ct + cfg.block_t / 2; ++bt)
        for (int bx = cx - cfg.block_x / 2; bx <= cx + cfg.block_x / 2; ++bx) {
          if (bt < 0 || bt >= cfg.cells_t || bx < 0 || bx >= cfg.cells_x) continue;
          for (int k = 0; k < cfg.n_bins; ++k) block.push_back(h(bt * cfg.cells_x + bx, k));
        }
      double sq = 0.0;
      for (double v : block) sq += v * v;
      const double denom = std::sqrt(sq) + cfg.norm_epsilon;
      for (int k = 0; k < cfg.n_bins; ++k)
        out(ct * cfg.cells_x + cx, k) = denom > 0.0 ? h(ct * cfg.cells_x + cx, k) / denom : 0.0;
    }
  return out;
}

Gradients unit_gradients(const HogConfig& cfg, double direction_deg) {
  Gradients g;
  g.magnitude = Eigen::ArrayXXd::Ones(cfg.patch_h, cfg.patch_w);
  g.direction_deg = Eigen::ArrayXXd::Constant(cfg.patch_h, cfg.patch_w, direction_deg);
  return g;
}

}  // namespace

TEST_CASE("gradients of a constant patch vanish") {
  Patch p = make_patch(18, 20);
  p.data.setConstant(3.7);
  Gradients g = gradients(p);
  CHECK((g.magnitude == 0.0).all());
  CHECK((g.direction_deg == 0.0).all());
}

TEST_CASE("gradients of axis ramps are analytic") {
  Patch p = make_patch(18, 20);
  SUBCASE("horizontal ramp points at 0 degrees") {
    for (int t = 0; t < 18; ++t)
      for (int x = 0; x < 20; ++x) p.data(t, x) = x;
    Gradients g = gradients(p);
    for (int t = 0; t < 18; ++t)
      for (int x = 1; x < 19; ++x) {
        CHECK(g.magnitude(t, x) == 1.0);
        CHECK(g.direction_deg(t, x) == 0.0);
      }
    // replicated borders halve the one-sided difference
    CHECK(g.magnitude(9, 0) == 0.5);
    CHECK(g.magnitude(9, 19) == 0.5);
  }
  SUBCASE("vertical ramp points at 90 degrees") {
    for (int t = 0; t < 18; ++t)
      for (int x = 0; x < 20; ++x) p.data(t, x) = t;
    Gradients g = gradients(p);
    for (int t = 1; t < 17; ++t)
      for (int x = 0; x < 20; ++x) {
        CHECK(g.magnitude(t, x) == 1.0);
        CHECK(g.direction_deg(t, x) == 90.0);
      }
  }
  SUBCASE("unsigned gradient folds a falling diagonal to 135 degrees") {
    for (int t = 0; t < 18; ++t)
      for (int x = 0; x < 20; ++x) p.data(t, x) = x - t;
    Gradients g = gradients(p);
    CHECK(g.magnitude(9, 10) == doctest::Approx(std::sqrt(2.0)));
    CHECK(g.direction_deg(9, 10) == doctest::Approx(135.0));
  }
}

TEST_CASE("gradients match a per-pixel stencil oracle") {
  Patch p = random_patch(18, 20, 5);
  Gradients got = gradients(p);
  Gradients want = oracle_gradients(p);
  for (int t = 0; t < 18; ++t)
    for (int x = 0; x < 20; ++x) {
      CHECK(got.magnitude(t, x) == doctest::Approx(want.magnitude(t, x)).epsilon(1e-12));
      CHECK(got.direction_deg(t, x) ==
            doctest::Approx(want.direction_deg(t, x)).epsilon(1e-12));
      CHECK(got.direction_deg(t, x) >= 0.0);
      CHECK(got.direction_deg(t, x) < 180.0);
    }
}

TEST_CASE("gradients reject tiny patches") {
  Patch p = make_patch(2, 20);
  CHECK_THROWS_WITH_AS(gradients(p), "hog: patch 2x20 too small for gradients (need >= 3x3)",
                       Error);
}

TEST_CASE("cell histograms put unit mass in a single bin") {
  HogConfig cfg;
  CellHistGrid grid = cell_histograms(unit_gradients(cfg, 0.0), cfg);
  for (int ct = 0; ct < 3; ++ct)
    for (int cx = 0; cx < 4; ++cx) {
      CHECK(grid.cell(ct, cx)[0] == 30.0);  // 6x5 pixels per cell
      for (int k = 1; k < 9; ++k) CHECK(grid.cell(ct, cx)[k] == 0.0);
    }
}

TEST_CASE("midpoint directions break ties to the lower bin") {
  HogConfig cfg;
  CellHistGrid at10 = cell_histograms(unit_gradients(cfg, 10.0), cfg);
  CHECK(at10.cell(1, 1)[0] == 30.0);
  CHECK(at10.cell(1, 1)[1] == 0.0);

  // 170 degrees is equidistant from bin 8 (160) and the wrapped bin 0
  CellHistGrid at170 = cell_histograms(unit_gradients(cfg, 170.0), cfg);
  CHECK(at170.cell(1, 1)[0] == 30.0);
  CHECK(at170.cell(1, 1)[8] == 0.0);

  CellHistGrid at171 = cell_histograms(unit_gradients(cfg, 171.0), cfg);
  CHECK(at171.cell(1, 1)[0] == 30.0);
  CellHistGrid at169 = cell_histograms(unit_gradients(cfg, 169.0), cfg);
  CHECK(at169.cell(1, 1)[8] == 30.0);
}

TEST_CASE("cell histograms match a per-pixel accumulation oracle") {
  HogConfig cfg;
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> dir(0.0, 180.0);
  std::uniform_real_distribution<double> mag(0.0, 3.0);
  Gradients g;
  g.magnitude.resize(18, 20);
  g.direction_deg.resize(18, 20);
  for (int t = 0; t < 18; ++t)
    for (int x = 0; x < 20; ++x) {
      g.direction_deg(t, x) = dir(rng);
      g.magnitude(t, x) = mag(rng);
    }
  CellHistGrid grid = cell_histograms(g, cfg);
  Eigen::ArrayXXd want = oracle_histograms(g, cfg);
  CHECK(grid.h.rows() == want.rows());
  for (int r = 0; r < want.rows(); ++r)
    for (int k = 0; k < 9; ++k) CHECK(grid.h(r, k) == doctest::Approx(want(r, k)).epsilon(1e-12));
}

TEST_CASE("cell histograms reject mismatched arrays") {
  HogConfig cfg;
  Gradients g;
  g.magnitude = Eigen::ArrayXXd::Zero(12, 20);
  g.direction_deg = Eigen::ArrayXXd::Zero(12, 20);
  CHECK_THROWS_WITH_AS(cell_histograms(g, cfg),
                       "hog: gradient arrays do not match the configured patch size", Error);
}

TEST_CASE("block_normalize reduces to the cell itself when neighbors are zero") {
  HogConfig cfg;
  CellHistGrid grid;
  grid.cells_t = 3;
  grid.cells_x = 4;
  grid.h = Eigen::ArrayXXd::Zero(12, 9);
  grid.cell(0, 0) << 3.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0;  // norm 5
  CellHistGrid out = block_normalize(grid, cfg);
  CHECK(out.cell(0, 0)[0] == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(out.cell(0, 0)[1] == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(out.cell(0, 0).matrix().norm() == doctest::Approx(1.0).epsilon(1e-9));
  // cells whose block contains the mass get divided but stay zero
  CHECK((out.cell(1, 1) == 0.0).all());
  // input untouched
  CHECK(grid.cell(0, 0)[0] == 3.0);
}

TEST_CASE("block_normalize of an all-zero grid stays zero and finite") {
  HogConfig cfg;
  CellHistGrid grid;
  grid.cells_t = 3;
  grid.cells_x = 4;
  grid.h = Eigen::ArrayXXd::Zero(12, 9);
  SUBCASE("epsilon guard") {}
  SUBCASE("epsilon zero") { cfg.norm_epsilon = 0.0; }
  CellHistGrid out = block_normalize(grid, cfg);
  CHECK((out.h == 0.0).all());
  CHECK(out.h.isFinite().all());
}

TEST_CASE("block_normalize matches a block-materialization oracle") {
  HogConfig cfg;
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> amp(0.0, 2.0);
  CellHistGrid grid;
  grid.cells_t = 3;
  grid.cells_x = 4;
  grid.h.resize(12, 9);
  for (int r = 0; r < 12; ++r)
    for (int k = 0; k < 9; ++k) grid.h(r, k) = amp(rng);
  CellHistGrid out = block_normalize(grid, cfg);
  Eigen::ArrayXXd want = oracle_normalize(grid.h, cfg);
  for (int r = 0; r < 12; ++r)
    for (int k = 0; k < 9; ++k) CHECK(out.h(r, k) == doctest::Approx(want(r, k)).epsilon(1e-12));
}

TEST_CASE("hog_feature has the documented length and rejects bad patches") {
  HogConfig cfg;
  CHECK(cfg.feature_len() == 108);
  Eigen::VectorXd f = hog_feature(random_patch(18, 20, 2), cfg);
  CHECK(f.size() == 108);
  CHECK_THROWS_WITH_AS(hog_feature(random_patch(18, 21, 2), cfg),
                       "hog: patch is 18x21, config expects 18x20", Error);
}

TEST_CASE("hog_feature of a constant patch is the zero vector") {
  HogConfig cfg;
  Patch p = make_patch(18, 20);
  p.data.setConstant(-1.5);
  cfg.normalize = false;
  CHECK(hog_feature(p, cfg).isZero());
  cfg.normalize = true;
  CHECK(hog_feature(p, cfg).isZero());
}

TEST_CASE("hog_feature matches the composed oracles") {
  HogConfig cfg;
  Patch p = random_patch(18, 20, 77);
  Eigen::ArrayXXd hist = oracle_histograms(oracle_gradients(p), cfg);

  cfg.normalize = false;
  Eigen::VectorXd raw = hog_feature(p, cfg);
  int i = 0;
  for (int r = 0; r < 12; ++r)
    for (int k = 0; k < 9; ++k, ++i) CHECK(raw[i] == doctest::Approx(hist(r, k)).epsilon(1e-12));

  cfg.normalize = true;
  Eigen::VectorXd normed = hog_feature(p, cfg);
  Eigen::ArrayXXd want = oracle_normalize(hist, cfg);
  i = 0;
  for (int r = 0; r < 12; ++r)
    for (int k = 0; k < 9; ++k, ++i) CHECK(normed[i] == doctest::Approx(want(r, k)).epsilon(1e-12));

  CHECK((raw - normed).norm() > 1e-6);
}

TEST_CASE("hog_feature entries are non-negative") {
  HogConfig cfg;
  for (unsigned seed : {1u, 9u, 42u}) {
    Patch p = random_patch(18, 20, seed);
    cfg.normalize = false;
    CHECK(hog_feature(p, cfg).minCoeff() >= 0.0);
    cfg.normalize = true;
    CHECK(hog_feature(p, cfg).minCoeff() >= 0.0);
  }
}

TEST_CASE("hog_feature is exactly invariant to brightness shifts") {
  HogConfig cfg;
  Patch p = dyadic_patch(18, 20, 3);
  Patch shifted = p;
  shifted.data += 5.25;
  Eigen::VectorXd a = hog_feature(p, cfg);
  Eigen::VectorXd b = hog_feature(shifted, cfg);
  CHECK((a.array() == b.array()).all());
}

TEST_CASE("unnormalized hog_feature scales linearly with contrast") {
  HogConfig cfg;
  cfg.normalize = false;
  Patch p = random_patch(18, 20, 19);
  Patch doubled = p;
  doubled.data *= 2.0;
  Eigen::VectorXd f = hog_feature(p, cfg);
  Eigen::VectorXd g = hog_feature(doubled, cfg);
  CHECK((g.array() == 2.0 * f.array()).all());
}

TEST_CASE("normalized hog_feature with zero epsilon is contrast invariant") {
  HogConfig cfg;
  cfg.norm_epsilon = 0.0;
  Patch p = random_patch(18, 20, 23);  // every block sees gradient mass
  Patch doubled = p;
  doubled.data *= 2.0;
  Eigen::VectorXd f = hog_feature(p, cfg);
  Eigen::VectorXd g = hog_feature(doubled, cfg);
  CHECK((f.array() == g.array()).all());
}

TEST_CASE("unnormalized feature sum equals total gradient magnitude") {
  HogConfig cfg;
  cfg.normalize = false;
  Patch p = random_patch(18, 20, 31);
  const double total = gradients(p).magnitude.sum();
  CHECK(hog_feature(p, cfg).sum() == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("hog config validation") {
  HogConfig cfg;
  cfg.cells_t = 5;  // 18 not divisible by 5
  CHECK_THROWS_WITH_AS(cfg.validate(), "hog: patch_h 18 is not divisible into 5 cells", Error);
  cfg = HogConfig{};
  cfg.n_bins = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = HogConfig{};
  cfg.block_t = 2;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = HogConfig{};
  cfg.norm_epsilon = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
