#pragma once

#include "gprdet/core.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace gprdet {

struct ForestConfig {
  int n_trees = 100;
  int n_split_candidates = 2;
  int min_leaf = 1;
  std::uint64_t seed = 0;

  void validate(int feature_dim) const;
};

// Binary decision tree stored flat; root at node 0. Internal nodes route
// x[feature] < threshold to `left`, otherwise `right`. Leaves carry the
// threat fraction of their training samples and have left = right = -1.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double fraction = 0.0;

  bool is_leaf() const { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
};

struct Forest {
  ForestConfig config;
  int feature_dim = 0;
  std::vector<Tree> trees;
};

// Grows a bagged ensemble. Examples are first put in a canonical order
// (lexicographic by feature vector, then label) so the result is invariant to
// the order training rows arrive in; each tree draws its bootstrap sample and
// split candidates from an RNG seeded by (config.seed, tree index). Candidate
// thresholds are midpoints of consecutive sorted unique feature values; ties
// in Gini gain go to the lower feature index, then the lower threshold.
Forest train(const Eigen::MatrixXd& features, const std::vector<std::uint8_t>& labels,
             const ForestConfig& config, int jobs = 1);

// Mean over trees of the reached leaf's threat fraction, in [0,1].
double predict(const Forest& forest, Eigen::Ref<const Eigen::VectorXd> feature);

// Versioned binary blob so train and score can run as separate processes.
void save_forest(const Forest& forest, const std::filesystem::path& path);
Forest load_forest(const std::filesystem::path& path);

}  // namespace gprdet
