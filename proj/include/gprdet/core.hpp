#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gprdet {

// All errors thrown by the library. Messages name the offending field or
// parameter.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

enum class ScanDirection { DownTrack, CrossTrack };

const char* to_string(ScanDirection d);

// 3-D cube of GPR amplitudes over one lane.
//
// Storage is a single contiguous buffer indexed time-fastest, then
// cross-track, then down-track, so each A-scan is a contiguous run of
// n_time samples.
struct Volume {
  int n_down = 0;
  int n_cross = 0;
  int n_time = 0;
  double dx_down_m = 0.0;
  double dx_cross_m = 0.0;
  double dt_ns = 0.0;
  std::vector<double> data;

  static Volume zeros(int n_down, int n_cross, int n_time, double dx_down_m,
                      double dx_cross_m, double dt_ns);

  std::size_t size() const { return data.size(); }

  std::size_t offset(int down, int cross, int t) const {
    return (static_cast<std::size_t>(down) * n_cross + cross) * n_time + t;
  }

  double at(int down, int cross, int t) const { return data[offset(down, cross, t)]; }
  double& at(int down, int cross, int t) { return data[offset(down, cross, t)]; }

  // Contiguous view of one A-scan (time series at a spatial position).
  Eigen::Map<const Eigen::ArrayXd> ascan(int down, int cross) const {
    return {data.data() + offset(down, cross, 0), n_time};
  }
  Eigen::Map<Eigen::ArrayXd> ascan(int down, int cross) {
    return {data.data() + offset(down, cross, 0), n_time};
  }

  double lane_area_m2() const { return n_down * dx_down_m * n_cross * dx_cross_m; }

  bool in_bounds(int down, int cross) const {
    return down >= 0 && down < n_down && cross >= 0 && cross < n_cross;
  }

  // Throws Error if dims, spacings or the buffer length are inconsistent.
  void validate() const;
};

// 2-D image of stacked A-scans: rows are time samples, columns are adjacent
// spatial positions. The central column is the A-scan the scan was extracted
// around.
struct BScan {
  Eigen::ArrayXXd data;  // n_time x n_space
  ScanDirection direction = ScanDirection::CrossTrack;
  int down_idx = 0;   // origin: central A-scan position in the parent volume
  int cross_idx = 0;

  int n_time() const { return static_cast<int>(data.rows()); }
  int n_space() const { return static_cast<int>(data.cols()); }
  int central_col() const { return n_space() / 2; }
};

// Fixed-size window cut out of a B-scan (time x space), the unit of feature
// extraction.
struct Patch {
  Eigen::ArrayXXd data;  // h x w
  int center_t = 0;  // requested center, parent B-scan coordinates
  int center_x = 0;

  int height() const { return static_cast<int>(data.rows()); }
  int width() const { return static_cast<int>(data.cols()); }
};

struct GroundTruth {
  int lane_id = 0;
  int object_id = 0;
  double down_m = 0.0;
  double cross_m = 0.0;
  double depth_m = 0.0;
  bool is_threat = false;
};

// Key identifying one buried object across lanes.
struct ObjectKey {
  int lane_id = 0;
  int object_id = 0;
  friend auto operator<=>(const ObjectKey&, const ObjectKey&) = default;
};

enum class AlarmLabel { Threat, NonThreat };

// A prescreener-flagged spatial location. `matched_object` is set iff the
// label is Threat; `confidence` and `fold` are filled in by the pipeline.
struct Alarm {
  int lane_id = 0;
  double down_m = 0.0;
  double cross_m = 0.0;
  int down_idx = 0;
  int cross_idx = 0;
  AlarmLabel label = AlarmLabel::NonThreat;
  std::optional<int> matched_object;
  std::optional<double> confidence;
  int fold = -1;

  bool is_threat() const { return label == AlarmLabel::Threat; }
};

// One lane's data cube together with its buried-object ground truth.
struct LaneData {
  Volume volume;
  std::vector<GroundTruth> truths;
};

// Extracts a (n_time x (2*half_width+1)) B-scan centered on the A-scan at
// (down_idx, cross_idx). Columns run along `direction`; columns that would
// fall outside the volume are clamped to the boundary A-scan.
BScan extract_bscan(const Volume& volume, ScanDirection direction, int down_idx,
                    int cross_idx, int half_width);

// Cuts an h x w window centered at (center_t, central column). Windows that
// would overhang an edge are shifted, not padded, so the result is always
// exactly h x w.
Patch extract_patch(const BScan& bscan, int center_t, int h, int w);

}  // namespace gprdet
