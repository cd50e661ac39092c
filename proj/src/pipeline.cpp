#include "gprdet/pipeline.hpp"

#include "gprdet/parallel.hpp"
#include "gprdet/preprocess.hpp"
#include "gprdet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

namespace gprdet {

void PipelineConfig::validate() const {
  msek.validate();
  if (prescreen.smooth_halfwidth_cells < 0)
    throw Error("pipeline: smooth_halfwidth_cells must be >= 0");
  if (prescreen.threshold_percentile < 0.0 || prescreen.threshold_percentile > 100.0)
    throw Error("pipeline: threshold_percentile must be in [0, 100]");
  if (prescreen.min_alarm_separation_m < 0.0)
    throw Error("pipeline: min_alarm_separation_m must be >= 0");
  if (!(halo_m > 0.0)) throw Error("pipeline: halo_m must be > 0");
  if (train_threat_keypoints < 1) throw Error("pipeline: train_threat_keypoints must be >= 1");
  if (train_nonthreat_stride < 1 || test_stride < 1)
    throw Error("pipeline: strides must be >= 1");
  if (top_l < 1) throw Error("pipeline: top_l must be >= 1");
  if (msek_bscan_halfwidth < 0) throw Error("pipeline: msek_bscan_halfwidth must be >= 0");
  if (cv.n_folds_obcv < 2) throw Error("pipeline: n_folds_obcv must be >= 2");
}

std::vector<int> strided_centers(int n_time, int stride) {
  std::vector<int> centers;
  for (int t = stride; t < n_time; t += stride) centers.push_back(t);
  return centers;
}

std::vector<Alarm> prescreen(const Volume& volume, const PipelineConfig& config) {
  config.validate();
  volume.validate();
  const int nd = volume.n_down;
  const int nc = volume.n_cross;

  Eigen::ArrayXXd energy(nd, nc);
  for (int d = 0; d < nd; ++d)
    for (int c = 0; c < nc; ++c) energy(d, c) = volume.ascan(d, c).square().sum();

  const int hw = config.prescreen.smooth_halfwidth_cells;
  Eigen::ArrayXXd smoothed(nd, nc);
  for (int d = 0; d < nd; ++d) {
    const int d0 = std::max(0, d - hw);
    const int d1 = std::min(nd - 1, d + hw);
    for (int c = 0; c < nc; ++c) {
      const int c0 = std::max(0, c - hw);
      const int c1 = std::min(nc - 1, c + hw);
      smoothed(d, c) = energy.block(d0, c0, d1 - d0 + 1, c1 - c0 + 1).mean();
    }
  }

  // nearest-rank percentile of the smoothed map
  std::vector<double> values(smoothed.data(), smoothed.data() + smoothed.size());
  std::sort(values.begin(), values.end());
  const std::size_t rank = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(config.prescreen.threshold_percentile / 100.0 * values.size())));
  const double threshold = values[std::min(rank, values.size()) - 1];

  struct Candidate {
    double value;
    int d, c;
  };
  std::vector<Candidate> candidates;
  for (int d = 0; d < nd; ++d) {
    for (int c = 0; c < nc; ++c) {
      const double v = smoothed(d, c);
      if (v < threshold || !(v > 0.0)) continue;
      bool is_max = true;
      for (int dd = -1; dd <= 1 && is_max; ++dd)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dd == 0 && dc == 0) continue;
          const int nd2 = d + dd, nc2 = c + dc;
          if (nd2 < 0 || nd2 >= nd || nc2 < 0 || nc2 >= nc) continue;
          if (smoothed(nd2, nc2) > v) {
            is_max = false;
            break;
          }
        }
      if (is_max) candidates.push_back({v, d, c});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.d != b.d) return a.d < b.d;
    return a.c < b.c;
  });

  std::vector<Alarm> alarms;
  for (const auto& cand : candidates) {
    const double down_m = cand.d * volume.dx_down_m;
    const double cross_m = cand.c * volume.dx_cross_m;
    const bool clear = std::none_of(alarms.begin(), alarms.end(), [&](const Alarm& a) {
      return std::hypot(a.down_m - down_m, a.cross_m - cross_m) <
             config.prescreen.min_alarm_separation_m;
    });
    if (!clear) continue;
    Alarm a;
    a.down_m = down_m;
    a.cross_m = cross_m;
    a.down_idx = cand.d;
    a.cross_idx = cand.c;
    alarms.push_back(a);
  }
  return alarms;
}

std::vector<Alarm> associate(std::vector<Alarm> alarms, const std::vector<GroundTruth>& truths,
                             double halo_m) {
  for (Alarm& a : alarms) {
    a.label = AlarmLabel::NonThreat;
    a.matched_object.reset();
    double best = halo_m;
    for (const GroundTruth& t : truths) {
      if (!t.is_threat) continue;
      const double dist = std::hypot(a.down_m - t.down_m, a.cross_m - t.cross_m);
      if (dist < best || (dist == best && (!a.matched_object || t.object_id < *a.matched_object))) {
        best = dist;
        a.label = AlarmLabel::Threat;
        a.matched_object = t.object_id;
      }
    }
  }
  return alarms;
}

std::vector<Keypoint> alarm_keypoints(const Volume& volume, const Alarm& alarm,
                                      const PipelineConfig& config) {
  const BScan bscan = extract_bscan(volume, ScanDirection::CrossTrack, alarm.down_idx,
                                    alarm.cross_idx, config.msek_bscan_halfwidth);
  return msek(background_normalize(bscan), config.msek);
}

namespace {

// Training rows for one alarm: (t_idx, feature) pairs.
struct AlarmRows {
  std::vector<int> ts;
  Eigen::MatrixXd features;  // one row per t
};

AlarmRows training_rows(const Volume& volume, const Alarm& alarm,
                        const GprHogConfig& feature_config, const PipelineConfig& config) {
  AlarmRows rows;
  if (alarm.is_threat()) {
    const auto kps = top_k(alarm_keypoints(volume, alarm, config), config.train_threat_keypoints);
    for (const Keypoint& kp : kps) rows.ts.push_back(kp.t_idx);
  } else {
    rows.ts = strided_centers(volume.n_time, config.train_nonthreat_stride);
  }
  rows.features.resize(static_cast<Eigen::Index>(rows.ts.size()), feature_config.feature_len());
  for (std::size_t i = 0; i < rows.ts.size(); ++i)
    rows.features.row(static_cast<Eigen::Index>(i)) =
        alarm_feature(volume, alarm.down_idx, alarm.cross_idx, rows.ts[i], feature_config);
  return rows;
}

Eigen::MatrixXd test_rows(const Volume& volume, const Alarm& alarm,
                          const GprHogConfig& feature_config, const PipelineConfig& config) {
  const std::vector<int> centers = strided_centers(volume.n_time, config.test_stride);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(centers.size()), feature_config.feature_len());
  for (std::size_t i = 0; i < centers.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) =
        alarm_feature(volume, alarm.down_idx, alarm.cross_idx, centers[i], feature_config);
  return rows;
}

}  // namespace

TrainingSet build_training_set(const Volume& volume, const std::vector<Alarm>& alarms,
                               const GprHogConfig& feature_config,
                               const PipelineConfig& config) {
  config.validate();
  feature_config.validate();
  std::vector<AlarmRows> per_alarm(alarms.size());
  for (std::size_t i = 0; i < alarms.size(); ++i)
    per_alarm[i] = training_rows(volume, alarms[i], feature_config, config);

  Eigen::Index n_rows = 0;
  for (const auto& r : per_alarm) n_rows += r.features.rows();

  TrainingSet set;
  set.features.resize(n_rows, feature_config.feature_len());
  set.labels.reserve(n_rows);
  set.provenance.reserve(n_rows);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < alarms.size(); ++i) {
    for (std::size_t k = 0; k < per_alarm[i].ts.size(); ++k) {
      set.features.row(row++) = per_alarm[i].features.row(static_cast<Eigen::Index>(k));
      set.labels.push_back(alarms[i].is_threat() ? 1 : 0);
      set.provenance.push_back({static_cast<int>(i), per_alarm[i].ts[k]});
    }
  }
  return set;
}

double top_l_sum(std::vector<double> values, int l) {
  if (l < 0) l = 0;
  const int n = std::min<int>(l, static_cast<int>(values.size()));
  std::partial_sort(values.begin(), values.begin() + n, values.end(), std::greater<>());
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += values[i];
  return sum;
}

std::vector<double> score_locations(const Volume& volume, const Alarm& alarm,
                                    const Forest& forest, const GprHogConfig& feature_config,
                                    const PipelineConfig& config) {
  const Eigen::MatrixXd rows = test_rows(volume, alarm, feature_config, config);
  std::vector<double> confidences(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    confidences[i] = predict(forest, rows.row(i).transpose());
  return confidences;
}

double score_alarm(const Volume& volume, const Alarm& alarm, const Forest& forest,
                   const GprHogConfig& feature_config, const PipelineConfig& config) {
  return top_l_sum(score_locations(volume, alarm, forest, feature_config, config),
                   config.top_l);
}

std::vector<int> make_folds(const std::vector<Alarm>& alarms, const CvConfig& cv,
                            int lane_count) {
  std::vector<int> folds(alarms.size(), -1);
  if (cv.scheme == CvScheme::LBCV) {
    for (std::size_t i = 0; i < alarms.size(); ++i) {
      if (alarms[i].lane_id < 0 || alarms[i].lane_id >= lane_count)
        throw Error("make_folds: alarm lane_id " + std::to_string(alarms[i].lane_id) +
                    " outside [0, " + std::to_string(lane_count) + ")");
      folds[i] = alarms[i].lane_id;
    }
    return folds;
  }

  // OBCV: shuffle threat objects, deal round-robin; alarms follow their object.
  std::set<ObjectKey> object_set;
  for (const Alarm& a : alarms)
    if (a.is_threat() && a.matched_object) object_set.insert({a.lane_id, *a.matched_object});
  std::vector<ObjectKey> objects(object_set.begin(), object_set.end());
  if (static_cast<int>(objects.size()) < cv.n_folds_obcv)
    throw Error("make_folds: OBCV needs at least " + std::to_string(cv.n_folds_obcv) +
                " threat objects, only " + std::to_string(objects.size()) + " present");

  auto rng = make_rng(cv.seed, 0);
  std::shuffle(objects.begin(), objects.end(), rng);
  std::map<ObjectKey, int> object_fold;
  for (std::size_t i = 0; i < objects.size(); ++i)
    object_fold[objects[i]] = static_cast<int>(i % cv.n_folds_obcv);

  std::vector<std::size_t> nonthreat_idx;
  for (std::size_t i = 0; i < alarms.size(); ++i) {
    if (alarms[i].is_threat() && alarms[i].matched_object)
      folds[i] = object_fold.at({alarms[i].lane_id, *alarms[i].matched_object});
    else
      nonthreat_idx.push_back(i);
  }
  std::shuffle(nonthreat_idx.begin(), nonthreat_idx.end(), rng);
  for (std::size_t k = 0; k < nonthreat_idx.size(); ++k)
    folds[nonthreat_idx[k]] = static_cast<int>(k % cv.n_folds_obcv);
  return folds;
}

std::vector<Alarm> prescreen_lanes(const std::vector<LaneData>& lanes,
                                   const PipelineConfig& config) {
  std::vector<Alarm> alarms;
  for (std::size_t l = 0; l < lanes.size(); ++l) {
    std::vector<Alarm> lane_alarms = prescreen(lanes[l].volume, config);
    for (Alarm& a : lane_alarms) a.lane_id = static_cast<int>(l);
    lane_alarms = associate(std::move(lane_alarms), lanes[l].truths, config.halo_m);
    alarms.insert(alarms.end(), lane_alarms.begin(), lane_alarms.end());
  }
  return alarms;
}

AlarmFeatures compute_features(const std::vector<LaneData>& lanes,
                               const std::vector<Alarm>& alarms,
                               const GprHogConfig& feature_config, const PipelineConfig& config,
                               int jobs) {
  config.validate();
  feature_config.validate();
  AlarmFeatures features;
  features.test_rows.resize(alarms.size());
  features.train_rows.resize(alarms.size());
  features.train_ts.resize(alarms.size());
  const bool strides_match = config.train_nonthreat_stride == config.test_stride;
  parallel_for(static_cast<int>(alarms.size()), jobs, [&](int i) {
    const Alarm& alarm = alarms[i];
    if (alarm.lane_id < 0 || alarm.lane_id >= static_cast<int>(lanes.size()))
      throw Error("compute_features: alarm lane_id " + std::to_string(alarm.lane_id) +
                  " has no lane");
    const Volume& volume = lanes[alarm.lane_id].volume;
    features.test_rows[i] = test_rows(volume, alarm, feature_config, config);
    if (!alarm.is_threat() && strides_match) {
      features.train_ts[i] = strided_centers(volume.n_time, config.test_stride);
      features.train_rows[i] = features.test_rows[i];
    } else {
      AlarmRows rows = training_rows(volume, alarm, feature_config, config);
      features.train_ts[i] = std::move(rows.ts);
      features.train_rows[i] = std::move(rows.features);
    }
  });
  return features;
}

std::vector<std::vector<double>> cv_location_scores(const std::vector<Alarm>& alarms,
                                                    const AlarmFeatures& features,
                                                    const std::vector<int>& folds,
                                                    const ForestConfig& forest_config,
                                                    int jobs) {
  if (alarms.size() != features.train_rows.size() || alarms.size() != folds.size())
    throw Error("cv_location_scores: alarms, features and folds must be the same length");
  std::vector<std::vector<double>> confidences(alarms.size());
  if (alarms.empty()) return confidences;
  const Eigen::Index dim = features.test_rows[0].cols();

  std::vector<int> fold_ids(folds);
  std::sort(fold_ids.begin(), fold_ids.end());
  fold_ids.erase(std::unique(fold_ids.begin(), fold_ids.end()), fold_ids.end());

  for (int fold : fold_ids) {
    Eigen::Index n_rows = 0;
    for (std::size_t i = 0; i < alarms.size(); ++i)
      if (folds[i] != fold) n_rows += features.train_rows[i].rows();

    Eigen::MatrixXd x(n_rows, dim);
    std::vector<std::uint8_t> y;
    std::vector<TrainingSet::Row> provenance;
    y.reserve(n_rows);
    provenance.reserve(n_rows);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < alarms.size(); ++i) {
      if (folds[i] == fold) continue;
      for (Eigen::Index k = 0; k < features.train_rows[i].rows(); ++k) {
        x.row(row++) = features.train_rows[i].row(k);
        y.push_back(alarms[i].is_threat() ? 1 : 0);
        provenance.push_back({static_cast<int>(i), features.train_ts[i][k]});
      }
    }

    // fold hygiene: no training row may originate from the fold under test
    for (const auto& p : provenance)
      if (folds[p.alarm_index] == fold)
        throw Error("run_cv: fold hygiene violated: training row from alarm " +
                    std::to_string(p.alarm_index) + " leaked into fold " + std::to_string(fold));

    const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool has_neg = std::find(y.begin(), y.end(), 0) != y.end();
    if (!has_pos || !has_neg)
      throw Error("run_cv: training set for fold " + std::to_string(fold) +
                  " contains a single class (" + (has_pos ? "threats" : "non-threats") +
                  " only)");

    const Forest forest = train(x, y, forest_config, jobs);
    std::vector<int> members;
    for (std::size_t i = 0; i < alarms.size(); ++i)
      if (folds[i] == fold) members.push_back(static_cast<int>(i));
    parallel_for(static_cast<int>(members.size()), jobs, [&](int m) {
      const int i = members[m];
      const Eigen::MatrixXd& rows = features.test_rows[i];
      confidences[i].resize(rows.rows());
      for (Eigen::Index r = 0; r < rows.rows(); ++r)
        confidences[i][r] = predict(forest, rows.row(r).transpose());
    });
  }
  return confidences;
}

void apply_top_l(std::vector<Alarm>& alarms,
                 const std::vector<std::vector<double>>& location_confidences,
                 const std::vector<int>& folds, int top_l) {
  if (alarms.size() != location_confidences.size() || alarms.size() != folds.size())
    throw Error("apply_top_l: alarms, confidences and folds must be the same length");
  for (std::size_t i = 0; i < alarms.size(); ++i) {
    alarms[i].confidence = top_l_sum(location_confidences[i], top_l);
    alarms[i].fold = folds[i];
  }
}

std::vector<Alarm> run_cv(const std::vector<LaneData>& lanes,
                          const GprHogConfig& feature_config, const ForestConfig& forest_config,
                          const PipelineConfig& config, int jobs) {
  config.validate();
  feature_config.validate();
  std::vector<Alarm> alarms = prescreen_lanes(lanes, config);
  const std::vector<int> folds = make_folds(alarms, config.cv, static_cast<int>(lanes.size()));
  const AlarmFeatures features = compute_features(lanes, alarms, feature_config, config, jobs);
  const auto confidences = cv_location_scores(alarms, features, folds, forest_config, jobs);
  apply_top_l(alarms, confidences, folds, config.top_l);
  return alarms;
}

}  // namespace gprdet
