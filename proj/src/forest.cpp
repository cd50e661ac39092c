#include "gprdet/forest.hpp"

#include "binio.hpp"
#include "gprdet/io.hpp"
#include "gprdet/parallel.hpp"
#include "gprdet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace gprdet {

void ForestConfig::validate(int feature_dim) const {
  if (n_trees < 1) throw Error("forest: n_trees must be >= 1");
  if (n_split_candidates < 1 || n_split_candidates > feature_dim)
    throw Error("forest: n_split_candidates must be in [1, feature dim " +
                std::to_string(feature_dim) + "]");
  if (min_leaf < 1) throw Error("forest: min_leaf must be >= 1");
}

namespace {

struct Split {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

double gini(int n_pos, int n) {
  const double p = static_cast<double>(n_pos) / n;
  return 2.0 * p * (1.0 - p);
}

class TreeGrower {
public:
  TreeGrower(const Eigen::MatrixXd& x, const std::vector<std::uint8_t>& y,
             const ForestConfig& cfg, std::uint64_t tree_seed)
      : x_(x), y_(y), cfg_(cfg), rng_(tree_seed) {
    feat_order_.resize(x.cols());
    std::iota(feat_order_.begin(), feat_order_.end(), 0);
  }

  Tree grow() {
    const int n = static_cast<int>(x_.rows());
    std::vector<int> sample(n);
    std::uniform_int_distribution<int> draw(0, n - 1);
    for (int i = 0; i < n; ++i) sample[i] = draw(rng_);
    std::sort(sample.begin(), sample.end());

    Tree tree;
    grow_node(tree, sample);
    return tree;
  }

private:
  int grow_node(Tree& tree, std::vector<int>& sample) {
    const int node_idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    const int n = static_cast<int>(sample.size());
    int n_pos = 0;
    for (int i : sample) n_pos += y_[i];
    tree.nodes[node_idx].fraction = static_cast<double>(n_pos) / n;

    if (n_pos == 0 || n_pos == n || n < 2 * cfg_.min_leaf) return node_idx;

    const Split best = best_split(sample, n_pos);
    if (best.feature < 0) return node_idx;

    std::vector<int> left, right;
    left.reserve(n);
    right.reserve(n);
    for (int i : sample) (x_(i, best.feature) < best.threshold ? left : right).push_back(i);
    sample.clear();
    sample.shrink_to_fit();

    tree.nodes[node_idx].feature = best.feature;
    tree.nodes[node_idx].threshold = best.threshold;
    const int l = grow_node(tree, left);
    const int r = grow_node(tree, right);
    tree.nodes[node_idx].left = l;
    tree.nodes[node_idx].right = r;
    return node_idx;
  }

  // Uniform candidate subset via partial Fisher-Yates over a persistent
  // permutation (uniform regardless of its current order), evaluated in
  // ascending feature order so equal gains resolve to the lower index.
  Split best_split(const std::vector<int>& sample, int n_pos) {
    const int k = cfg_.n_split_candidates;
    const int d = static_cast<int>(feat_order_.size());
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> pick(i, d - 1);
      std::swap(feat_order_[i], feat_order_[pick(rng_)]);
    }
    candidates_.assign(feat_order_.begin(), feat_order_.begin() + k);
    std::sort(candidates_.begin(), candidates_.end());

    const int n = static_cast<int>(sample.size());
    const double impurity = gini(n_pos, n);
    Split best;
    for (int f : candidates_) {
      sorted_.clear();
      for (int i : sample) sorted_.push_back({x_(i, f), y_[i]});
      std::sort(sorted_.begin(), sorted_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      int left_n = 0;
      int left_pos = 0;
      for (int i = 0; i + 1 < n; ++i) {
        ++left_n;
        left_pos += sorted_[i].second;
        const double v1 = sorted_[i].first;
        const double v2 = sorted_[i + 1].first;
        if (v1 == v2) continue;
        const double thr = v1 + (v2 - v1) / 2.0;
        if (thr <= v1 || thr >= v2) continue;  // midpoint rounded onto a data value
        const int right_n = n - left_n;
        if (left_n < cfg_.min_leaf || right_n < cfg_.min_leaf) continue;
        const double gain = impurity -
                            (static_cast<double>(left_n) / n) * gini(left_pos, left_n) -
                            (static_cast<double>(right_n) / n) * gini(n_pos - left_pos, right_n);
        if (gain > best.gain) best = {gain, f, thr};
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const std::vector<std::uint8_t>& y_;
  const ForestConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<int> feat_order_;
  std::vector<int> candidates_;
  std::vector<std::pair<double, std::uint8_t>> sorted_;
};

}  // namespace

Forest train(const Eigen::MatrixXd& features, const std::vector<std::uint8_t>& labels,
             const ForestConfig& config, int jobs) {
  const int n = static_cast<int>(features.rows());
  const int dim = static_cast<int>(features.cols());
  if (n == 0 || dim == 0) throw Error("forest: empty training set");
  if (labels.size() != static_cast<std::size_t>(n))
    throw Error("forest: " + std::to_string(n) + " feature rows but " +
                std::to_string(labels.size()) + " labels");
  config.validate(dim);

  int n_pos = 0;
  for (auto l : labels) n_pos += l ? 1 : 0;
  if (n_pos == 0 || n_pos == n)
    throw Error("forest: training set needs at least one example of each class (got " +
                std::to_string(n_pos) + " of " + std::to_string(n) + " positive)");

  // canonical row order: lexicographic by feature values, then label
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    for (int j = 0; j < dim; ++j) {
      if (features(a, j) != features(b, j)) return features(a, j) < features(b, j);
    }
    return labels[a] < labels[b];
  });
  Eigen::MatrixXd x(n, dim);
  std::vector<std::uint8_t> y(n);
  for (int i = 0; i < n; ++i) {
    x.row(i) = features.row(order[i]);
    y[i] = labels[order[i]] ? 1 : 0;
  }

  Forest forest;
  forest.config = config;
  forest.feature_dim = dim;
  forest.trees.resize(config.n_trees);
  parallel_for(config.n_trees, jobs, [&](int t) {
    TreeGrower grower(x, y, config, derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    forest.trees[t] = grower.grow();
  });
  return forest;
}

double predict(const Forest& forest, Eigen::Ref<const Eigen::VectorXd> feature) {
  if (feature.size() != forest.feature_dim)
    throw Error("forest: feature has " + std::to_string(feature.size()) +
                " dims, forest was trained on " + std::to_string(forest.feature_dim));
  double sum = 0.0;
  for (const Tree& tree : forest.trees) {
    int i = 0;
    while (!tree.nodes[i].is_leaf()) {
      const TreeNode& nd = tree.nodes[i];
      i = feature[nd.feature] < nd.threshold ? nd.left : nd.right;
    }
    sum += tree.nodes[i].fraction;
  }
  return sum / forest.trees.size();
}

namespace {
constexpr char kForestMagic[4] = {'G', 'F', 'O', 'R'};
constexpr std::uint16_t kForestVersion = 1;
}  // namespace

void save_forest(const Forest& forest, const std::filesystem::path& path) {
  std::string out;
  binio::put_bytes(out, kForestMagic, 4);
  binio::put_u16(out, kForestVersion);
  binio::put_u32(out, static_cast<std::uint32_t>(forest.config.n_trees));
  binio::put_u32(out, static_cast<std::uint32_t>(forest.config.n_split_candidates));
  binio::put_u32(out, static_cast<std::uint32_t>(forest.config.min_leaf));
  binio::put_u64(out, forest.config.seed);
  binio::put_u32(out, static_cast<std::uint32_t>(forest.feature_dim));
  binio::put_u32(out, static_cast<std::uint32_t>(forest.trees.size()));
  for (const Tree& tree : forest.trees) {
    binio::put_u32(out, static_cast<std::uint32_t>(tree.nodes.size()));
    for (const TreeNode& nd : tree.nodes) {
      binio::put_u32(out, static_cast<std::uint32_t>(nd.feature));
      binio::put_f64(out, nd.threshold);
      binio::put_u32(out, static_cast<std::uint32_t>(nd.left));
      binio::put_u32(out, static_cast<std::uint32_t>(nd.right));
      binio::put_f64(out, nd.fraction);
    }
  }
  atomic_write(path, out);
}

Forest load_forest(const std::filesystem::path& path) {
  const std::string buf = binio::read_file(path);
  binio::Reader r(buf, path.string());
  r.need(4, "magic");
  if (buf.compare(0, 4, kForestMagic, 4) != 0)
    throw Error(path.string() + ": bad magic (not a GFOR forest file)");
  r.u32("magic");
  const std::uint16_t version = r.u16("version");
  if (version != kForestVersion)
    throw Error(path.string() + ": unsupported version " + std::to_string(version));

  Forest forest;
  forest.config.n_trees = static_cast<int>(r.u32("n_trees"));
  forest.config.n_split_candidates = static_cast<int>(r.u32("n_split_candidates"));
  forest.config.min_leaf = static_cast<int>(r.u32("min_leaf"));
  forest.config.seed = r.u64("seed");
  forest.feature_dim = static_cast<int>(r.u32("feature_dim"));
  const std::uint32_t n_trees = r.u32("tree count");
  if (n_trees < 1) throw Error(path.string() + ": forest holds no trees");
  if (forest.feature_dim < 1) throw Error(path.string() + ": feature_dim must be >= 1");
  forest.trees.resize(n_trees);
  for (std::uint32_t t = 0; t < n_trees; ++t) {
    const std::uint32_t n_nodes = r.u32("node count");
    if (n_nodes < 1) throw Error(path.string() + ": tree with no nodes");
    auto& nodes = forest.trees[t].nodes;
    nodes.resize(n_nodes);
    for (auto& nd : nodes) {
      nd.feature = static_cast<int>(r.u32("node feature"));
      nd.threshold = r.f64("node threshold");
      nd.left = static_cast<int>(r.u32("node left"));
      nd.right = static_cast<int>(r.u32("node right"));
      nd.fraction = r.f64("node fraction");
      if (!(nd.fraction >= 0.0 && nd.fraction <= 1.0))
        throw Error(path.string() + ": leaf fraction outside [0,1]");
      if (nd.left >= 0) {
        if (nd.feature < 0 || nd.feature >= forest.feature_dim)
          throw Error(path.string() + ": node feature index out of range");
        if (nd.left >= static_cast<int>(n_nodes) || nd.right < 0 ||
            nd.right >= static_cast<int>(n_nodes))
          throw Error(path.string() + ": child index out of range");
      }
    }
  }
  if (r.remaining() != 0) throw Error(path.string() + ": trailing bytes after forest data");
  return forest;
}

}  // namespace gprdet
