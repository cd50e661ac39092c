#include "gprdet/commands.hpp"

#include "gprdet/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace gprdet {

namespace {

namespace fs = std::filesystem;

std::string seed_dir_name(int replicate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "seed_%04d", replicate);
  return buf;
}

std::string lane_stem(int lane) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "lane_%02d", lane);
  return buf;
}

std::vector<LaneData> load_preprocessed_lanes(const fs::path& dir,
                                              const PreprocConfig& preproc) {
  if (!fs::is_directory(dir))
    throw Error("no dataset directory at " + dir.string() + " (run `gprdet synth` first)");
  std::vector<LaneData> lanes;
  for (int lane = 0;; ++lane) {
    const fs::path volume_path = dir / (lane_stem(lane) + ".gprv");
    if (!fs::exists(volume_path)) break;
    LaneData data;
    data.volume = preprocess(load_volume(volume_path), preproc);
    data.truths = load_ground_truth_csv(dir / (lane_stem(lane) + "_truth.csv"));
    lanes.push_back(std::move(data));
  }
  if (lanes.empty())
    throw Error("no lane volumes (lane_00.gprv ...) under " + dir.string());
  return lanes;
}

std::vector<GroundTruth> all_truths(const std::vector<LaneData>& lanes) {
  std::vector<GroundTruth> truths;
  for (const LaneData& lane : lanes)
    truths.insert(truths.end(), lane.truths.begin(), lane.truths.end());
  return truths;
}

double total_area_m2(const std::vector<LaneData>& lanes) {
  double area = 0.0;
  for (const LaneData& lane : lanes) area += lane.volume.lane_area_m2();
  return area;
}

const char* scheme_name(CvScheme s) { return s == CvScheme::LBCV ? "LBCV" : "OBCV"; }

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

int cmd_synth(const ExperimentConfig& config, int jobs) {
  try {
    config.validate();
    for (int r = 0; r < config.replicates; ++r) {
      SynthConfig synth = config.synth;
      synth.seed = replicate_seeds(config.seed, r).synth;
      const std::vector<LaneData> lanes = generate_lanes(synth, jobs);
      const fs::path dir = config.output_dir / "data" / seed_dir_name(r);
      for (std::size_t i = 0; i < lanes.size(); ++i) {
        save_volume(lanes[i].volume, dir / (lane_stem(static_cast<int>(i)) + ".gprv"));
        save_ground_truth_csv(lanes[i].truths,
                              dir / (lane_stem(static_cast<int>(i)) + "_truth.csv"));
      }
      std::cout << "synth: wrote " << lanes.size() << " lanes under "
                << (config.output_dir / "data" / seed_dir_name(r)).string() << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "synth failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_run(const ExperimentConfig& config, int jobs) {
  try {
    config.validate();
    const std::vector<LaneData> lanes =
        load_preprocessed_lanes(config.output_dir / "data" / seed_dir_name(0), config.preproc);
    const std::vector<GroundTruth> truths = all_truths(lanes);
    const double area = total_area_m2(lanes);
    const RunSeeds seeds = replicate_seeds(config.seed, 0);

    ForestConfig forest = config.forest;
    forest.seed = seeds.forest;
    PipelineConfig base = config.pipeline;
    base.cv.seed = seeds.cv;

    const std::vector<Alarm> alarms = prescreen_lanes(lanes, base);
    const fs::path results = config.output_dir / "results" / "run";

    std::string report = "arm cv_scheme partial_auc\n";
    std::string summary;
    for (const ArmConfig& arm : config.arms) {
      const AlarmFeatures features = compute_features(lanes, alarms, arm.features, base, jobs);
      for (const CvScheme scheme : {CvScheme::LBCV, CvScheme::OBCV}) {
        PipelineConfig pcfg = base;
        pcfg.top_l = arm.top_l;
        pcfg.cv.scheme = scheme;
        const std::vector<int> folds =
            make_folds(alarms, pcfg.cv, static_cast<int>(lanes.size()));
        const auto confidences = cv_location_scores(alarms, features, folds, forest, jobs);
        std::vector<Alarm> scored = alarms;
        apply_top_l(scored, confidences, folds, pcfg.top_l);

        const RocCurve curve = roc(scored, truths, area);
        const double pauc = partial_auc(curve, config.eval.far_lo, config.eval.far_hi);

        const std::string tag = arm.name + "_" + lower(scheme_name(scheme));
        save_roc_csv(curve, results / ("roc_" + tag + ".csv"));
        save_alarms_csv(scored, results / ("alarms_" + tag + ".csv"));

        char row[160];
        std::snprintf(row, sizeof(row), "%s %s %.6f\n", arm.name.c_str(), scheme_name(scheme),
                      pauc);
        report += row;
        summary += "partial_auc." + arm.name + "." + scheme_name(scheme) + " = " +
                   format_double(pauc) + "\n";
      }
    }
    atomic_write(results / "report.txt", report);
    atomic_write(results / "summary.txt", summary);
    std::cout << report;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
}

namespace {

struct AblationArm {
  std::string name;
  bool normalize;
  int avg_halfcount;
  int top_l;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

int cmd_ablate(const ExperimentConfig& config, int jobs) {
  try {
    config.validate();

    const std::vector<AblationArm> arms = {
        {"HOG", true, 0, 3},           {"HOG-nonorm-L3", false, 0, 3},
        {"HOG-nonorm-L8", false, 0, 8}, {"HOG-nonorm-L10", false, 0, 10},
        {"HOG-nonorm-L12", false, 0, 12}, {"gprHOG", false, 3, 12},
    };

    const fs::path data_root = config.output_dir / "data";
    std::vector<std::pair<int, fs::path>> replicates;
    if (fs::is_directory(data_root)) {
      for (const auto& entry : fs::directory_iterator(data_root)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_directory() && name.rfind("seed_", 0) == 0)
          replicates.emplace_back(std::stoi(name.substr(5)), entry.path());
      }
    }
    std::sort(replicates.begin(), replicates.end());
    if (replicates.empty())
      throw Error("no seed_* dataset directories under " + data_root.string() +
                  " (run `gprdet synth` first)");

    // pauc[arm][scheme] -> one value per replicate
    std::map<std::string, std::map<std::string, std::vector<double>>> pauc;
    for (const auto& [replicate, dir] : replicates) {
      const std::vector<LaneData> lanes = load_preprocessed_lanes(dir, config.preproc);
      const std::vector<GroundTruth> truths = all_truths(lanes);
      const double area = total_area_m2(lanes);
      const RunSeeds seeds = replicate_seeds(config.seed, replicate);

      ForestConfig forest = config.forest;
      forest.seed = seeds.forest;
      PipelineConfig base = config.pipeline;
      base.cv.seed = seeds.cv;

      const std::vector<Alarm> alarms = prescreen_lanes(lanes, base);

      // arms sharing (normalize, avg_halfcount) share features and forests
      for (const auto& [fc_key, fc_arms] : [&] {
        std::map<std::pair<bool, int>, std::vector<const AblationArm*>> groups;
        for (const AblationArm& arm : arms)
          groups[{arm.normalize, arm.avg_halfcount}].push_back(&arm);
        return groups;
      }()) {
        GprHogConfig features_cfg;
        features_cfg.hog = config.hog;
        features_cfg.hog.normalize = fc_key.first;
        features_cfg.avg_halfcount = fc_key.second;
        features_cfg.bscan_halfwidth = config.bscan_halfwidth;
        const AlarmFeatures features =
            compute_features(lanes, alarms, features_cfg, base, jobs);

        for (const CvScheme scheme : {CvScheme::LBCV, CvScheme::OBCV}) {
          PipelineConfig pcfg = base;
          pcfg.cv.scheme = scheme;
          const std::vector<int> folds =
              make_folds(alarms, pcfg.cv, static_cast<int>(lanes.size()));
          const auto confidences = cv_location_scores(alarms, features, folds, forest, jobs);
          for (const AblationArm* arm : fc_arms) {
            std::vector<Alarm> scored = alarms;
            apply_top_l(scored, confidences, folds, arm->top_l);
            const double value =
                partial_auc(roc(scored, truths, area), config.eval.far_lo, config.eval.far_hi);
            pauc[arm->name][scheme_name(scheme)].push_back(value);
          }
        }
      }
    }

    const int n_reps = static_cast<int>(replicates.size());
    const int required = n_reps - n_reps / 5;

    std::string report;
    auto emit = [&](const std::string& line) {
      report += line + "\n";
      std::cout << line << "\n";
    };

    char buf[256];
    bool all_pass = true;
    for (const char* scheme : {"LBCV", "OBCV"}) {
      for (const AblationArm& arm : arms) {
        const std::vector<double>& values = pauc[arm.name][scheme];
        std::string list;
        for (double v : values) {
          std::snprintf(buf, sizeof(buf), "%s%.4f", list.empty() ? "" : " ", v);
          list += buf;
        }
        std::snprintf(buf, sizeof(buf), "%s %-14s median_partial_auc=%.4f  per_seed=[%s]",
                      scheme, arm.name.c_str(), median(values), list.c_str());
        emit(buf);
      }

      auto count_if_pairwise = [&](const char* hi, const char* lo, double margin) {
        const auto& a = pauc[hi][scheme];
        const auto& b = pauc[lo][scheme];
        int n = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
          if (a[i] - b[i] >= margin && a[i] > b[i]) ++n;
        return n;
      };

      const int a_count = count_if_pairwise("HOG-nonorm-L3", "HOG", 0.0);
      const int c_count = count_if_pairwise("gprHOG", "HOG-nonorm-L12", 0.0);
      const int d_count = count_if_pairwise("gprHOG", "HOG", 0.02);

      const double med_l3 = median(pauc["HOG-nonorm-L3"][scheme]);
      const double med_l8 = median(pauc["HOG-nonorm-L8"][scheme]);
      const double med_l10 = median(pauc["HOG-nonorm-L10"][scheme]);
      const double med_l12 = median(pauc["HOG-nonorm-L12"][scheme]);
      const double spread = std::max({med_l8, med_l10, med_l12}) -
                            std::min({med_l8, med_l10, med_l12});
      const bool b_pass = med_l12 >= med_l3 && spread < 0.03;

      const bool a_pass = a_count >= required;
      const bool c_pass = c_count >= required;
      const bool d_pass = d_count >= required;
      all_pass = all_pass && a_pass && b_pass && c_pass && d_pass;

      std::snprintf(buf, sizeof(buf),
                    "%s ordering a (no-norm > norm):        %s (%d/%d seeds)", scheme,
                    a_pass ? "PASS" : "FAIL", a_count, n_reps);
      emit(buf);
      std::snprintf(buf, sizeof(buf),
                    "%s ordering b (L12 >= L3, flat 8..12): %s (spread %.4f)", scheme,
                    b_pass ? "PASS" : "FAIL", spread);
      emit(buf);
      std::snprintf(buf, sizeof(buf),
                    "%s ordering c (averaging helps):       %s (%d/%d seeds)", scheme,
                    c_pass ? "PASS" : "FAIL", c_count, n_reps);
      emit(buf);
      std::snprintf(buf, sizeof(buf),
                    "%s ordering d (gprHOG > HOG + 0.02):   %s (%d/%d seeds)", scheme,
                    d_pass ? "PASS" : "FAIL", d_count, n_reps);
      emit(buf);
    }
    emit(all_pass ? "ablate: PASS" : "ablate: FAIL");

    const fs::path results = config.output_dir / "results" / "ablate";
    std::string csv = "arm,cv_scheme,replicate,partial_auc\n";
    for (const auto& [arm, by_scheme] : pauc)
      for (const auto& [scheme, values] : by_scheme)
        for (std::size_t i = 0; i < values.size(); ++i)
          csv += arm + ',' + scheme + ',' + std::to_string(replicates[i].first) + ',' +
                 format_double(values[i]) + '\n';
    atomic_write(results / "partial_auc.csv", csv);
    atomic_write(results / "report.txt", report);
    return all_pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "ablate failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gprdet
