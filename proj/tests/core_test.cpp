#include <doctest.h>

#include "gprdet/core.hpp"
#include "gprdet/rng.hpp"

#include <random>

using namespace gprdet;

namespace {

Volume numbered_volume(int nd, int nc, int nt) {
  Volume v = Volume::zeros(nd, nc, nt, 0.05, 0.05, 0.1);
  for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] = static_cast<double>(i);
  return v;
}

Volume random_volume(int nd, int nc, int nt, std::uint64_t seed) {
  Volume v = Volume::zeros(nd, nc, nt, 0.05, 0.05, 0.1);
  auto rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& a : v.data) a = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("volume validate rejects inconsistent fields") {
  Volume v = numbered_volume(2, 3, 4);
  CHECK_NOTHROW(v.validate());

  Volume bad = v;
  bad.data.pop_back();
  CHECK_THROWS_WITH_AS(bad.validate(),
                       "volume: data length 23 does not match dims (expected 24)", Error);

  bad = v;
  bad.n_time = 0;
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = v;
  bad.dx_down_m = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);

  bad = v;
  bad.dt_ns = -0.1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("volume storage is time-fastest") {
  Volume v = numbered_volume(2, 3, 4);
  CHECK(v.at(0, 0, 0) == 0.0);
  CHECK(v.at(0, 0, 3) == 3.0);
  CHECK(v.at(0, 1, 0) == 4.0);
  CHECK(v.at(1, 0, 0) == 12.0);
  CHECK(v.ascan(1, 2)[0] == doctest::Approx((1 * 3 + 2) * 4));
}

TEST_CASE("extract_bscan interior center returns the neighboring A-scans") {
  Volume v = numbered_volume(40, 25, 6);
  const BScan b = extract_bscan(v, ScanDirection::CrossTrack, 17, 12, 10);
  REQUIRE(b.n_time() == 6);
  REQUIRE(b.n_space() == 21);
  CHECK(b.central_col() == 10);
  for (int j = 0; j < 21; ++j) {
    const int c = 12 + (j - 10);
    for (int t = 0; t < 6; ++t) CHECK(b.data(t, j) == v.at(17, c, t));
  }
}

TEST_CASE("extract_bscan clamps columns at the volume edge") {
  Volume v = numbered_volume(5, 7, 3);
  const BScan b = extract_bscan(v, ScanDirection::CrossTrack, 2, 0, 2);
  REQUIRE(b.n_space() == 5);
  // the two columns left of center duplicate column 0
  for (int t = 0; t < 3; ++t) {
    CHECK(b.data(t, 0) == v.at(2, 0, t));
    CHECK(b.data(t, 1) == v.at(2, 0, t));
    CHECK(b.data(t, 2) == v.at(2, 0, t));
    CHECK(b.data(t, 3) == v.at(2, 1, t));
  }
}

TEST_CASE("extract_bscan matches a clamped-index oracle at every center") {
  Volume v = random_volume(6, 5, 4, 11);
  for (int dir = 0; dir < 2; ++dir) {
    const auto direction = dir == 0 ? ScanDirection::DownTrack : ScanDirection::CrossTrack;
    for (int d = 0; d < v.n_down; ++d)
      for (int c = 0; c < v.n_cross; ++c) {
        const int hw = 3;
        const BScan b = extract_bscan(v, direction, d, c, hw);
        for (int j = 0; j < b.n_space(); ++j) {
          int dd = d, cc = c;
          int& moving = direction == ScanDirection::DownTrack ? dd : cc;
          const int limit = direction == ScanDirection::DownTrack ? v.n_down : v.n_cross;
          moving = std::max(0, std::min(limit - 1, moving + j - hw));
          for (int t = 0; t < v.n_time; ++t) CHECK(b.data(t, j) == v.at(dd, cc, t));
        }
      }
  }
}

TEST_CASE("down- and cross-track B-scans share the central A-scan") {
  Volume v = random_volume(8, 6, 5, 3);
  const BScan down = extract_bscan(v, ScanDirection::DownTrack, 4, 2, 3);
  const BScan cross = extract_bscan(v, ScanDirection::CrossTrack, 4, 2, 3);
  CHECK((down.data.col(down.central_col()) == cross.data.col(cross.central_col())).all());
}

TEST_CASE("extract_bscan rejects out-of-bounds centers") {
  Volume v = numbered_volume(4, 4, 4);
  CHECK_THROWS_AS(extract_bscan(v, ScanDirection::CrossTrack, 4, 0, 1), Error);
  CHECK_THROWS_AS(extract_bscan(v, ScanDirection::CrossTrack, 0, -1, 1), Error);
  CHECK_THROWS_AS(extract_bscan(v, ScanDirection::CrossTrack, 0, 0, -1), Error);
}

TEST_CASE("extract_patch interior center is a contiguous slice") {
  Volume v = numbered_volume(3, 25, 60);
  const BScan b = extract_bscan(v, ScanDirection::CrossTrack, 1, 12, 10);
  const Patch p = extract_patch(b, 30, 18, 20);
  REQUIRE(p.height() == 18);
  REQUIRE(p.width() == 20);
  // rows [30-9, 30+9), columns centered on the central A-scan
  for (int i = 0; i < 18; ++i)
    for (int j = 0; j < 20; ++j) CHECK(p.data(i, j) == b.data(21 + i, j));
}

TEST_CASE("extract_patch shifts overhanging windows inside the B-scan") {
  Volume v = numbered_volume(3, 25, 60);
  const BScan b = extract_bscan(v, ScanDirection::CrossTrack, 1, 12, 10);

  const Patch top = extract_patch(b, 0, 18, 20);
  for (int i = 0; i < 18; ++i)
    for (int j = 0; j < 20; ++j) CHECK(top.data(i, j) == b.data(i, j));

  const Patch bottom = extract_patch(b, 59, 18, 20);
  for (int i = 0; i < 18; ++i)
    for (int j = 0; j < 20; ++j) CHECK(bottom.data(i, j) == b.data(60 - 18 + i, j));
}

TEST_CASE("extract_patch matches the shifted-window oracle at every center") {
  Volume v = random_volume(3, 9, 12, 7);
  const BScan b = extract_bscan(v, ScanDirection::DownTrack, 1, 4, 4);
  const int h = 5, w = 6;
  for (int t = 0; t < b.n_time(); ++t) {
    const Patch p = extract_patch(b, t, h, w);
    REQUIRE(p.height() == h);
    REQUIRE(p.width() == w);
    int t0 = t - h / 2;
    t0 = std::max(0, std::min(b.n_time() - h, t0));
    int x0 = b.central_col() - w / 2;
    x0 = std::max(0, std::min(b.n_space() - w, x0));
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) CHECK(p.data(i, j) == b.data(t0 + i, x0 + j));
  }
}

TEST_CASE("extract_patch rejects windows larger than the B-scan") {
  Volume v = numbered_volume(3, 5, 10);
  const BScan b = extract_bscan(v, ScanDirection::CrossTrack, 1, 2, 2);
  CHECK_THROWS_AS(extract_patch(b, 5, 11, 3), Error);
  CHECK_THROWS_AS(extract_patch(b, 5, 3, 6), Error);
  CHECK_THROWS_AS(extract_patch(b, 5, 0, 3), Error);
}

TEST_CASE("object keys order by lane then object id") {
  CHECK(ObjectKey{0, 5} < ObjectKey{1, 0});
  CHECK(ObjectKey{2, 1} < ObjectKey{2, 3});
  CHECK(ObjectKey{2, 3} == ObjectKey{2, 3});
}
