#pragma once

#include "gprdet/core.hpp"

#include <filesystem>
#include <vector>

namespace gprdet {

struct RocPoint {
  double threshold = 0.0;
  double far_per_m2 = 0.0;
  double pd = 0.0;
};

// Operating points sorted by FAR ascending (threshold descending); pd is
// non-decreasing along the list.
struct RocCurve {
  std::vector<RocPoint> points;
  double total_area_m2 = 0.0;
  int n_threat_objects = 0;
};

// Threshold sweep over the distinct confidences (descending) plus a final
// zero-threshold endpoint. At threshold tau, pd = unique threat objects with
// a matched alarm of confidence >= tau over all threat objects in `truths`;
// far = NonThreat alarms with confidence >= tau per square meter.
RocCurve roc(const std::vector<Alarm>& scored_alarms, const std::vector<GroundTruth>& truths,
             double total_area_m2);

// Mean pd of the step-interpolated (conservative) curve over
// [far_lo, far_hi]: pd holds its last achieved value to the right, and is 0
// left of the first operating point.
double partial_auc(const RocCurve& curve, double far_lo, double far_hi);

// CSV with header threshold,far_per_m2,pd.
void save_roc_csv(const RocCurve& curve, const std::filesystem::path& path);

}  // namespace gprdet
