#pragma once

#include "gprdet/core.hpp"
#include "gprdet/features.hpp"
#include "gprdet/forest.hpp"
#include "gprdet/keypoints.hpp"

#include <cstdint>
#include <vector>

namespace gprdet {

// Energy-map prescreener. Not a reconstruction of any published prescreener;
// it exists to feed the classifier a realistic alarm stream.
struct PrescreenConfig {
  int smooth_halfwidth_cells = 2;
  double threshold_percentile = 92.0;
  double min_alarm_separation_m = 0.5;
};

enum class CvScheme { LBCV, OBCV };

struct CvConfig {
  CvScheme scheme = CvScheme::LBCV;
  int n_folds_obcv = 10;
  std::uint64_t seed = 0;
};

struct PipelineConfig {
  PrescreenConfig prescreen;
  MsekConfig msek;
  int msek_bscan_halfwidth = 10;
  double halo_m = 0.25;
  int train_threat_keypoints = 4;
  int train_nonthreat_stride = 4;
  int test_stride = 4;
  int top_l = 3;
  CvConfig cv;

  void validate() const;
};

// Patch centers visited by the temporal sweeps: t = stride * k for k >= 1
// while t < n_time. 330 samples at stride 4 gives the 82 test locations.
std::vector<int> strided_centers(int n_time, int stride);

// Alarms at spatial local maxima of the smoothed per-A-scan energy map that
// sit at or above the threshold percentile, greedily thinned to
// min_alarm_separation_m (strongest first). lane_id is left 0.
std::vector<Alarm> prescreen(const Volume& volume, const PipelineConfig& config);

// Labels each alarm against the threat truths: Threat iff the nearest threat
// lies within halo_m (inclusive), recording that object; clutter truths never
// grant Threat labels.
std::vector<Alarm> associate(std::vector<Alarm> alarms, const std::vector<GroundTruth>& truths,
                             double halo_m);

// MSEK keypoints for one alarm: background-normalized cross-track B-scan,
// energy maxima of its central A-scan.
std::vector<Keypoint> alarm_keypoints(const Volume& volume, const Alarm& alarm,
                                      const PipelineConfig& config);

struct TrainingSet {
  Eigen::MatrixXd features;           // row per example
  std::vector<std::uint8_t> labels;   // 1 = threat
  struct Row {
    int alarm_index = -1;  // into the alarms list the set was built from
    int t_idx = -1;
  };
  std::vector<Row> provenance;
};

// Threat alarms contribute one row per top-train_threat_keypoints MSEK
// keypoint; non-threat alarms one row per strided center.
TrainingSet build_training_set(const Volume& volume, const std::vector<Alarm>& alarms,
                               const GprHogConfig& feature_config,
                               const PipelineConfig& config);

// Sum of the min(l, size) largest values.
double top_l_sum(std::vector<double> values, int l);

// Per-location confidences over the strided test centers.
std::vector<double> score_locations(const Volume& volume, const Alarm& alarm,
                                    const Forest& forest, const GprHogConfig& feature_config,
                                    const PipelineConfig& config);

// Alarm confidence: top-L sum of the per-location confidences.
double score_alarm(const Volume& volume, const Alarm& alarm, const Forest& forest,
                   const GprHogConfig& feature_config, const PipelineConfig& config);

// Fold index per alarm. LBCV: fold = lane_id, one fold per lane. OBCV: threat
// objects are shuffled by the cv seed and dealt round-robin over
// n_folds_obcv folds (alarms follow their object); non-threat alarms are
// shuffled by the same RNG and dealt likewise.
std::vector<int> make_folds(const std::vector<Alarm>& alarms, const CvConfig& cv,
                            int lane_count);

// prescreen + associate over every lane, lane_id set to the lane's position.
std::vector<Alarm> prescreen_lanes(const std::vector<LaneData>& lanes,
                                   const PipelineConfig& config);

// Per-alarm feature rows, indexed alongside the alarms vector. test_rows holds
// one feature per strided test center; train_rows one per training example
// (MSEK keypoints for threats, strided centers for non-threats).
struct AlarmFeatures {
  std::vector<Eigen::MatrixXd> test_rows;
  std::vector<Eigen::MatrixXd> train_rows;
  std::vector<std::vector<int>> train_ts;
};

AlarmFeatures compute_features(const std::vector<LaneData>& lanes,
                               const std::vector<Alarm>& alarms,
                               const GprHogConfig& feature_config, const PipelineConfig& config,
                               int jobs = 1);

// Leave-one-fold-out forest training + per-location scoring. Entry i holds the
// per-test-center confidences for alarm i, produced by the forest trained with
// fold folds[i] held out. Checks fold hygiene and rejects single-class folds.
std::vector<std::vector<double>> cv_location_scores(const std::vector<Alarm>& alarms,
                                                    const AlarmFeatures& features,
                                                    const std::vector<int>& folds,
                                                    const ForestConfig& forest_config,
                                                    int jobs = 1);

// Fills confidence (top-L sum of the location scores) and fold on each alarm.
void apply_top_l(std::vector<Alarm>& alarms,
                 const std::vector<std::vector<double>>& location_confidences,
                 const std::vector<int>& folds, int top_l);

// Full leave-one-fold-out loop over preprocessed lanes: prescreen, associate,
// feature extraction, per-fold training and scoring. Returns every alarm with
// its fold and confidence set. Lane ids are positions in `lanes`.
std::vector<Alarm> run_cv(const std::vector<LaneData>& lanes,
                          const GprHogConfig& feature_config, const ForestConfig& forest_config,
                          const PipelineConfig& config, int jobs = 1);

}  // namespace gprdet
