#include "gprdet/eval.hpp"

#include "gprdet/io.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace gprdet {

RocCurve roc(const std::vector<Alarm>& scored_alarms, const std::vector<GroundTruth>& truths,
             double total_area_m2) {
  if (!(total_area_m2 > 0.0)) throw Error("roc: total_area_m2 must be > 0");
  int n_objects = 0;
  for (const GroundTruth& t : truths) n_objects += t.is_threat ? 1 : 0;
  if (n_objects == 0) throw Error("roc: no threat objects in the ground truth");
  for (const Alarm& a : scored_alarms)
    if (!a.confidence) throw Error("roc: alarm without a confidence (lane " +
                                   std::to_string(a.lane_id) + ")");

  struct Entry {
    double conf;
    bool threat;
    ObjectKey object;
  };
  std::vector<Entry> entries;
  entries.reserve(scored_alarms.size());
  for (const Alarm& a : scored_alarms) {
    Entry e;
    e.conf = *a.confidence;
    e.threat = a.is_threat() && a.matched_object.has_value();
    if (e.threat) e.object = {a.lane_id, *a.matched_object};
    entries.push_back(e);
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.conf > b.conf; });

  std::vector<double> thresholds;
  for (const Entry& e : entries)
    if (thresholds.empty() || e.conf != thresholds.back()) thresholds.push_back(e.conf);
  if (thresholds.empty() || thresholds.back() != 0.0) thresholds.push_back(0.0);

  RocCurve curve;
  curve.total_area_m2 = total_area_m2;
  curve.n_threat_objects = n_objects;

  std::set<ObjectKey> detected;
  int false_alarms = 0;
  std::size_t next = 0;
  for (double tau : thresholds) {
    while (next < entries.size() && entries[next].conf >= tau) {
      if (entries[next].threat)
        detected.insert(entries[next].object);
      else
        ++false_alarms;
      ++next;
    }
    RocPoint p;
    p.threshold = tau;
    p.far_per_m2 = false_alarms / total_area_m2;
    p.pd = static_cast<double>(detected.size()) / n_objects;
    curve.points.push_back(p);
  }
  return curve;
}

double partial_auc(const RocCurve& curve, double far_lo, double far_hi) {
  if (!(far_lo < far_hi)) throw Error("partial_auc: need far_lo < far_hi");

  // pd at a given FAR: last operating point at or below it (0 before the first)
  auto pd_at = [&](double far) {
    double pd = 0.0;
    for (const RocPoint& p : curve.points) {
      if (p.far_per_m2 > far) break;
      pd = p.pd;
    }
    return pd;
  };

  std::vector<double> cuts{far_lo};
  for (const RocPoint& p : curve.points)
    if (p.far_per_m2 > far_lo && p.far_per_m2 < far_hi) cuts.push_back(p.far_per_m2);
  cuts.push_back(far_hi);
  std::sort(cuts.begin(), cuts.end());

  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    area += pd_at(cuts[i]) * (cuts[i + 1] - cuts[i]);
  return area / (far_hi - far_lo);
}

void save_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
  std::string out = "threshold,far_per_m2,pd\n";
  for (const RocPoint& p : curve.points)
    out += format_double(p.threshold) + ',' + format_double(p.far_per_m2) + ',' +
           format_double(p.pd) + '\n';
  atomic_write(path, out);
}

}  // namespace gprdet
