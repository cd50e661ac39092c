#include "gprdet/config.hpp"

#include "gprdet/rng.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace gprdet {

void ExperimentConfig::validate() const {
  if (replicates < 1) throw Error("config: replicates must be >= 1");
  synth.validate();
  hog.validate();
  pipeline.validate();
  if (!(eval.far_lo < eval.far_hi)) throw Error("config: need far_lo < far_hi");
  if (arms.empty()) throw Error("config: at least one arm is required");
  std::set<std::string> names;
  for (const ArmConfig& arm : arms) {
    if (arm.name.empty()) throw Error("config: arm with empty name");
    if (!names.insert(arm.name).second)
      throw Error("config: duplicate arm name '" + arm.name + "'");
    arm.features.validate();
    if (arm.top_l < 1) throw Error("config: arm '" + arm.name + "' needs top_l >= 1");
  }
}

ExperimentConfig default_experiment() {
  ExperimentConfig cfg;
  ArmConfig hog;
  hog.name = "HOG";
  hog.features.hog = cfg.hog;
  hog.features.hog.normalize = true;
  hog.features.avg_halfcount = 0;
  hog.features.bscan_halfwidth = cfg.bscan_halfwidth;
  hog.top_l = 3;

  ArmConfig gprhog;
  gprhog.name = "gprHOG";
  gprhog.features.hog = cfg.hog;
  gprhog.features.hog.normalize = false;
  gprhog.features.avg_halfcount = 3;
  gprhog.features.bscan_halfwidth = cfg.bscan_halfwidth;
  gprhog.top_l = 12;

  cfg.arms = {hog, gprhog};
  return cfg;
}

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  std::vector<Entry> entries;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<Section> read_sections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path.string());
  std::vector<Section> sections{{"", {}}};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']')
        throw Error(path.string() + ":" + std::to_string(line_no) + ": unterminated section");
      sections.push_back({trim(text.substr(1, text.size() - 2)), {}});
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    Entry e;
    e.key = trim(text.substr(0, eq));
    e.value = trim(text.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty())
      throw Error(path.string() + ":" + std::to_string(line_no) + ": empty key");
    sections.back().entries.push_back(e);
  }
  return sections;
}

class KeyParser {
public:
  KeyParser(const std::filesystem::path& path, const std::string& section, const Entry& entry)
      : path_(path), section_(section), entry_(entry) {}

  [[noreturn]] void fail(const std::string& what) const {
    const std::string where = section_.empty() ? "" : " in section [" + section_ + "]";
    throw Error(path_.string() + ":" + std::to_string(entry_.line) + ": " + what + " for key '" +
                entry_.key + "'" + where);
  }

  int to_int() const {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(entry_.value, &used);
      if (used != entry_.value.size() || v < INT_MIN || v > INT_MAX) fail("invalid integer");
      return static_cast<int>(v);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail("invalid integer");
    }
  }

  std::uint64_t to_u64() const {
    try {
      std::size_t used = 0;
      if (!entry_.value.empty() && entry_.value[0] == '-') fail("invalid unsigned integer");
      const unsigned long long v = std::stoull(entry_.value, &used);
      if (used != entry_.value.size()) fail("invalid unsigned integer");
      return v;
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail("invalid unsigned integer");
    }
  }

  double to_double() const {
    try {
      std::size_t used = 0;
      const double v = std::stod(entry_.value, &used);
      if (used != entry_.value.size()) fail("invalid number");
      return v;
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail("invalid number");
    }
  }

  bool to_bool() const {
    if (entry_.value == "true" || entry_.value == "1") return true;
    if (entry_.value == "false" || entry_.value == "0") return false;
    fail("expected true/false");
  }

  const std::string& raw() const { return entry_.value; }

private:
  const std::filesystem::path& path_;
  const std::string& section_;
  const Entry& entry_;
};

void apply_preamble(ExperimentConfig& cfg, const KeyParser& p, const std::string& key) {
  if (key == "seed")
    cfg.seed = p.to_u64();
  else if (key == "replicates")
    cfg.replicates = p.to_int();
  else if (key == "output_dir")
    cfg.output_dir = p.raw();
  else
    p.fail("unknown key");
}

void apply_synth(SynthConfig& s, const KeyParser& p, const std::string& key) {
  if (key == "n_lanes") s.n_lanes = p.to_int();
  else if (key == "lane_length_m") s.lane_length_m = p.to_double();
  else if (key == "lane_width_m") s.lane_width_m = p.to_double();
  else if (key == "dx_down_m") s.dx_down_m = p.to_double();
  else if (key == "dx_cross_m") s.dx_cross_m = p.to_double();
  else if (key == "n_time") s.n_time = p.to_int();
  else if (key == "dt_ns") s.dt_ns = p.to_double();
  else if (key == "n_threats") s.n_threats = p.to_int();
  else if (key == "n_clutter") s.n_clutter = p.to_int();
  else if (key == "depth_min_m") s.depth_min_m = p.to_double();
  else if (key == "depth_max_m") s.depth_max_m = p.to_double();
  else if (key == "min_object_separation_m") s.min_object_separation_m = p.to_double();
  else if (key == "placement_margin_m") s.placement_margin_m = p.to_double();
  else if (key == "velocity_m_per_ns") s.velocity_m_per_ns = p.to_double();
  else if (key == "pulse_sigma_ns") s.pulse_sigma_ns = p.to_double();
  else if (key == "ground_time_ns") s.ground_time_ns = p.to_double();
  else if (key == "ground_jitter_samples") s.ground_jitter_samples = p.to_int();
  else if (key == "ground_amplitude") s.ground_amplitude = p.to_double();
  else if (key == "amplitude_decay_exponent") s.amplitude_decay_exponent = p.to_double();
  else if (key == "beam_sigma_m") s.beam_sigma_m = p.to_double();
  else if (key == "threat_amp_min") s.threat_amp_min = p.to_double();
  else if (key == "threat_amp_max") s.threat_amp_max = p.to_double();
  else if (key == "clutter_amp_min") s.clutter_amp_min = p.to_double();
  else if (key == "clutter_amp_max") s.clutter_amp_max = p.to_double();
  else if (key == "threat_echoes") s.threat_echoes = p.to_int();
  else if (key == "clutter_echoes_max") s.clutter_echoes_max = p.to_int();
  else if (key == "echo_spacing_ns") s.echo_spacing_ns = p.to_double();
  else if (key == "echo_decay") s.echo_decay = p.to_double();
  else if (key == "noise_sigma") s.noise_sigma = p.to_double();
  else p.fail("unknown key");
}

void apply_preproc(PreprocConfig& c, const KeyParser& p, const std::string& key) {
  if (key == "gate_t_min") c.gate_t_min = p.to_int();
  else if (key == "gate_t_max") c.gate_t_max = p.to_int();
  else if (key == "align_target_idx") c.align_target_idx = p.to_int();
  else if (key == "crop_start_idx") c.crop_start_idx = p.to_int();
  else if (key == "crop_len") c.crop_len = p.to_int();
  else if (key == "depth_norm_epsilon") c.depth_norm_epsilon = p.to_double();
  else p.fail("unknown key");
}

void apply_hog(HogConfig& c, const KeyParser& p, const std::string& key) {
  if (key == "patch_h") c.patch_h = p.to_int();
  else if (key == "patch_w") c.patch_w = p.to_int();
  else if (key == "cells_t") c.cells_t = p.to_int();
  else if (key == "cells_x") c.cells_x = p.to_int();
  else if (key == "block_t") c.block_t = p.to_int();
  else if (key == "block_x") c.block_x = p.to_int();
  else if (key == "n_bins") c.n_bins = p.to_int();
  else if (key == "normalize") c.normalize = p.to_bool();
  else if (key == "norm_epsilon") c.norm_epsilon = p.to_double();
  else p.fail("unknown key");
}

void apply_msek(MsekConfig& c, const KeyParser& p, const std::string& key) {
  if (key == "smooth_halfwidth") c.smooth_halfwidth = p.to_int();
  else if (key == "max_keypoints") c.max_keypoints = p.to_int();
  else if (key == "min_separation") c.min_separation = p.to_int();
  else p.fail("unknown key");
}

void apply_forest(ForestConfig& c, const KeyParser& p, const std::string& key) {
  if (key == "n_trees") c.n_trees = p.to_int();
  else if (key == "n_split_candidates") c.n_split_candidates = p.to_int();
  else if (key == "min_leaf") c.min_leaf = p.to_int();
  else p.fail("unknown key");
}

void apply_pipeline(PipelineConfig& c, const KeyParser& p, const std::string& key) {
  if (key == "smooth_halfwidth_cells") c.prescreen.smooth_halfwidth_cells = p.to_int();
  else if (key == "threshold_percentile") c.prescreen.threshold_percentile = p.to_double();
  else if (key == "min_alarm_separation_m") c.prescreen.min_alarm_separation_m = p.to_double();
  else if (key == "msek_bscan_halfwidth") c.msek_bscan_halfwidth = p.to_int();
  else if (key == "halo_m") c.halo_m = p.to_double();
  else if (key == "train_threat_keypoints") c.train_threat_keypoints = p.to_int();
  else if (key == "train_nonthreat_stride") c.train_nonthreat_stride = p.to_int();
  else if (key == "test_stride") c.test_stride = p.to_int();
  else if (key == "n_folds_obcv") c.cv.n_folds_obcv = p.to_int();
  else p.fail("unknown key");
}

void apply_eval(EvalWindow& c, const KeyParser& p, const std::string& key) {
  if (key == "far_lo") c.far_lo = p.to_double();
  else if (key == "far_hi") c.far_hi = p.to_double();
  else p.fail("unknown key");
}

void apply_arm(ArmConfig& arm, const KeyParser& p, const std::string& key) {
  if (key == "normalize") arm.features.hog.normalize = p.to_bool();
  else if (key == "avg_halfcount") arm.features.avg_halfcount = p.to_int();
  else if (key == "bscan_halfwidth") arm.features.bscan_halfwidth = p.to_int();
  else if (key == "top_l") arm.top_l = p.to_int();
  else p.fail("unknown key");
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::vector<Section> sections = read_sections(path);
  ExperimentConfig cfg = default_experiment();

  // base sections first so arms inherit the final [hog] geometry
  for (const Section& s : sections) {
    if (s.name.rfind("arm.", 0) == 0) continue;
    for (const Entry& e : s.entries) {
      KeyParser p(path, s.name, e);
      if (s.name.empty()) apply_preamble(cfg, p, e.key);
      else if (s.name == "synth") apply_synth(cfg.synth, p, e.key);
      else if (s.name == "preproc") apply_preproc(cfg.preproc, p, e.key);
      else if (s.name == "hog") apply_hog(cfg.hog, p, e.key);
      else if (s.name == "msek") apply_msek(cfg.pipeline.msek, p, e.key);
      else if (s.name == "forest") apply_forest(cfg.forest, p, e.key);
      else if (s.name == "pipeline") apply_pipeline(cfg.pipeline, p, e.key);
      else if (s.name == "eval") apply_eval(cfg.eval, p, e.key);
      else
        throw Error(path.string() + ": unknown section [" + s.name + "]");
    }
  }

  bool replaced_arms = false;
  for (const Section& s : sections) {
    if (s.name.rfind("arm.", 0) != 0) continue;
    if (!replaced_arms) {
      cfg.arms.clear();
      replaced_arms = true;
    }
    ArmConfig arm;
    arm.name = s.name.substr(4);
    arm.features.hog = cfg.hog;
    arm.features.bscan_halfwidth = cfg.bscan_halfwidth;
    for (const Entry& e : s.entries) apply_arm(arm, KeyParser(path, s.name, e), e.key);
    cfg.arms.push_back(arm);
  }
  if (!replaced_arms) {
    // rebuild default arms on top of any [hog] overrides
    for (ArmConfig& arm : cfg.arms) {
      const bool normalize = arm.features.hog.normalize;
      arm.features.hog = cfg.hog;
      arm.features.hog.normalize = normalize;
      arm.features.bscan_halfwidth = cfg.bscan_halfwidth;
    }
  }

  cfg.validate();
  return cfg;
}

RunSeeds replicate_seeds(std::uint64_t experiment_seed, int replicate) {
  enum : std::uint64_t { kSynthStream = 1, kForestStream = 2, kCvStream = 3 };
  RunSeeds seeds;
  seeds.synth = derive_seed(derive_seed(experiment_seed, kSynthStream),
                            static_cast<std::uint64_t>(replicate));
  seeds.forest = derive_seed(derive_seed(experiment_seed, kForestStream),
                             static_cast<std::uint64_t>(replicate));
  seeds.cv = derive_seed(derive_seed(experiment_seed, kCvStream),
                         static_cast<std::uint64_t>(replicate));
  return seeds;
}

}  // namespace gprdet
