// Contract tests for the gprdet binary on a desk-scale config: exit codes,
// output inventory and report shape. The full-size determinism and ablation
// checks live in the acceptance suite.

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gprdet_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static inline int counter = 0;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + GPRDET_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  if (raw == -1) return -1;
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : 128;
}

// 13 short lanes, one threat and one clutter object each, wide strides and a
// small forest so a full run stays in seconds
fs::path write_small_config(const fs::path& dir) {
  const fs::path cfg = dir / "small.cfg";
  std::ofstream out(cfg);
  out << "seed = 9\n"
         "replicates = 1\n"
         "\n"
         "[synth]\n"
         "lane_length_m = 6.0\n"
         "n_threats = 1\n"
         "n_clutter = 1\n"
         "\n"
         "[preproc]\n"
         "gate_t_max = 120\n"
         "\n"
         "[forest]\n"
         "n_trees = 5\n"
         "\n"
         "[pipeline]\n"
         "threshold_percentile = 95\n"
         "train_nonthreat_stride = 16\n"
         "test_stride = 16\n";
  return cfg;
}

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
  std::map<std::string, std::string> snap;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file())
      snap[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
  return snap;
}

std::string flags(const fs::path& cfg, const fs::path& out) {
  return "--config \"" + cfg.string() + "\" --output \"" + out.string() + "\"";
}

}  // namespace

TEST_CASE("synth writes one volume and one truth file per lane") {
  TempDir tmp;
  const fs::path cfg = write_small_config(tmp.path);
  REQUIRE(run_cli("synth " + flags(cfg, tmp.path / "out")) == 0);

  const fs::path data = tmp.path / "out" / "data" / "seed_0000";
  int volumes = 0, truths = 0;
  for (const auto& entry : fs::directory_iterator(data)) {
    const std::string name = entry.path().filename().string();
    if (name.ends_with(".gprv")) ++volumes;
    if (name.ends_with("_truth.csv")) ++truths;
  }
  CHECK(volumes == 13);
  CHECK(truths == 13);
}

TEST_CASE("synth is byte-identical across reruns") {
  TempDir tmp;
  const fs::path cfg = write_small_config(tmp.path);
  REQUIRE(run_cli("synth " + flags(cfg, tmp.path / "out")) == 0);
  const auto first = snapshot_dir(tmp.path / "out" / "data");
  REQUIRE(run_cli("synth " + flags(cfg, tmp.path / "out")) == 0);
  CHECK(first == snapshot_dir(tmp.path / "out" / "data"));
  CHECK(first.size() == 26);
}

TEST_CASE("synth fails with a nonzero exit on an unwritable output dir") {
  TempDir tmp;
  const fs::path cfg = write_small_config(tmp.path);
  std::ofstream(tmp.path / "blocker") << "not a directory";
  CHECK(run_cli("synth " + flags(cfg, tmp.path / "blocker" / "out")) != 0);
}

TEST_CASE("run fails with a nonzero exit when the dataset is missing") {
  TempDir tmp;
  const fs::path cfg = write_small_config(tmp.path);
  CHECK(run_cli("run " + flags(cfg, tmp.path / "out")) != 0);
}

TEST_CASE("run writes a ROC curve per arm and scheme plus the report table") {
  TempDir tmp;
  const fs::path cfg = write_small_config(tmp.path);
  REQUIRE(run_cli("synth " + flags(cfg, tmp.path / "out")) == 0);
  REQUIRE(run_cli("run " + flags(cfg, tmp.path / "out")) == 0);

  const fs::path results = tmp.path / "out" / "results" / "run";
  std::vector<std::string> roc_files;
  for (const auto& entry : fs::directory_iterator(results)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("roc_")) roc_files.push_back(name);
  }
  // default arms HOG and gprHOG, each under LBCV and OBCV
  CHECK(roc_files.size() == 4);
  for (const char* name : {"roc_HOG_lbcv.csv", "roc_HOG_obcv.csv", "roc_gprHOG_lbcv.csv",
                           "roc_gprHOG_obcv.csv", "alarms_HOG_lbcv.csv"})
    CHECK(fs::exists(results / name));

  const std::string report = slurp(results / "report.txt");
  CHECK(report.starts_with("arm cv_scheme partial_auc\n"));
  for (const char* row : {"HOG LBCV ", "HOG OBCV ", "gprHOG LBCV ", "gprHOG OBCV "})
    CHECK(report.find(row) != std::string::npos);

  const std::string summary = slurp(results / "summary.txt");
  for (const char* key : {"partial_auc.HOG.LBCV = ", "partial_auc.gprHOG.OBCV = "})
    CHECK(summary.find(key) != std::string::npos);
}

TEST_CASE("ablate reports a median line per arm and verdicts per scheme") {
  TempDir tmp;
  const fs::path cfg = write_small_config(tmp.path);
  REQUIRE(run_cli("synth " + flags(cfg, tmp.path / "out")) == 0);
  run_cli("ablate " + flags(cfg, tmp.path / "out"));  // verdicts may fail at this scale

  const fs::path results = tmp.path / "out" / "results" / "ablate";
  const std::string report = slurp(results / "report.txt");
  for (const char* scheme : {"LBCV", "OBCV"}) {
    for (const char* arm : {"HOG ", "HOG-nonorm-L3 ", "HOG-nonorm-L12 ", "gprHOG "})
      CHECK(report.find(std::string(scheme) + " " + arm) != std::string::npos);
    for (const char* ordering : {"ordering a", "ordering b", "ordering c", "ordering d"})
      CHECK(report.find(std::string(scheme) + " " + ordering) != std::string::npos);
  }
  CHECK((report.find("ablate: PASS") != std::string::npos ||
         report.find("ablate: FAIL") != std::string::npos));

  const std::string csv = slurp(results / "partial_auc.csv");
  CHECK(csv.starts_with("arm,cv_scheme,replicate,partial_auc\n"));
}

TEST_CASE("ablate fails with a nonzero exit when the dataset is missing") {
  TempDir tmp;
  const fs::path cfg = write_small_config(tmp.path);
  CHECK(run_cli("ablate " + flags(cfg, tmp.path / "out")) != 0);
}
