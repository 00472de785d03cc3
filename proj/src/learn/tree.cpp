#include <algorithm>
#include <cmath>
#include <numeric>

#include "models.hpp"

namespace reqfuse::detail {
namespace {

constexpr double kMinGain = 1e-12;

// Impurity of one side of a split: weighted Gini (times weight) for
// classification, sum of squared errors for regression.
struct GiniStats {
  std::vector<double> totals;
  double weight = 0.0;

  explicit GiniStats(int n_classes) : totals(static_cast<std::size_t>(n_classes), 0.0) {}
  void add(int label, double w) {
    totals[static_cast<std::size_t>(label)] += w;
    weight += w;
  }
  void remove(int label, double w) {
    totals[static_cast<std::size_t>(label)] -= w;
    weight -= w;
  }
  double cost() const {
    if (weight <= 0.0) return 0.0;
    double sq = 0.0;
    for (double t : totals) sq += t * t;
    return weight - sq / weight;
  }
};

struct SseStats {
  double sum = 0.0;
  double sum_sq = 0.0;
  double weight = 0.0;

  void add(double v, double w) {
    sum += w * v;
    sum_sq += w * v * v;
    weight += w;
  }
  void remove(double v, double w) {
    sum -= w * v;
    sum_sq -= w * v * v;
    weight -= w;
  }
  double cost() const { return weight <= 0.0 ? 0.0 : std::max(0.0, sum_sq - sum * sum / weight); }
};

template <typename Stats, typename Target>
class Builder {
 public:
  Builder(const FeatureMatrix& x, const Target& target, const std::vector<double>& weights, Stats empty,
          const TreeParams& params)
      : x_(x), target_(target), weights_(weights), empty_(std::move(empty)), params_(params), rng_(params.seed) {}

  std::vector<TreeNode> build(std::vector<std::size_t> rows) {
    grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  Stats stats_of(const std::vector<std::size_t>& rows) const {
    Stats s = empty_;
    for (auto r : rows) s.add(target_[r], weights_[r]);
    return s;
  }

  std::vector<int> candidate_features() {
    const int d = static_cast<int>(x_.cols());
    std::vector<int> features(static_cast<std::size_t>(d));
    std::iota(features.begin(), features.end(), 0);
    if (params_.max_features <= 0 || params_.max_features >= d) return features;
    for (int i = 0; i < params_.max_features; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng_.below(static_cast<std::uint64_t>(d - i));
      std::swap(features[static_cast<std::size_t>(i)], features[j]);
    }
    features.resize(static_cast<std::size_t>(params_.max_features));
    std::sort(features.begin(), features.end());
    return features;
  }

  int grow(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const Stats parent = stats_of(rows);
    nodes_[static_cast<std::size_t>(id)].value = leaf_value(parent);

    const bool depth_ok = params_.max_depth <= 0 || depth < params_.max_depth;
    if (!depth_ok || static_cast<int>(rows.size()) < params_.min_samples_split || parent.cost() <= kMinGain) {
      return id;
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = kMinGain;
    const double parent_cost = parent.cost();
    const auto leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    std::vector<std::size_t> sorted = rows;
    for (int f : candidate_features()) {
      std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) { return x_(a, f) < x_(b, f); });
      Stats left = empty_;
      Stats right = parent;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto r = sorted[i];
        left.add(target_[r], weights_[r]);
        right.remove(target_[r], weights_[r]);
        const double lo = x_(r, f);
        const double hi = x_(sorted[i + 1], f);
        if (!(lo < hi) || i + 1 < leaf || sorted.size() - i - 1 < leaf) continue;
        const double gain = parent_cost - left.cost() - right.cost();
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = lo + (hi - lo) / 2.0;
          if (!(best_threshold < hi)) best_threshold = lo;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (auto r : rows) (x_(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    nodes_[static_cast<std::size_t>(id)].feature = best_feature;
    nodes_[static_cast<std::size_t>(id)].threshold = best_threshold;
    const int l = grow(std::move(left_rows), depth + 1);
    const int rgt = grow(std::move(right_rows), depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = rgt;
    return id;
  }

  static std::vector<double> leaf_value(const GiniStats& s) {
    std::vector<double> v = s.totals;
    if (s.weight > 0.0)
      for (double& p : v) p /= s.weight;
    return v;
  }
  static std::vector<double> leaf_value(const SseStats& s) { return {s.weight > 0.0 ? s.sum / s.weight : 0.0}; }

  const FeatureMatrix& x_;
  const Target& target_;
  const std::vector<double>& weights_;
  Stats empty_;
  TreeParams params_;
  Rng rng_;
  std::vector<TreeNode> nodes_;
};

TreeParams tree_params(const ClassifierSpec& spec, std::uint64_t seed) {
  TreeParams p;
  p.max_depth = static_cast<int>(spec.get("max_depth", 0));
  p.min_samples_split = static_cast<int>(spec.get("min_samples_split", 2));
  p.min_samples_leaf = static_cast<int>(spec.get("min_samples_leaf", 1));
  p.max_features = static_cast<int>(spec.get("max_features", 0));
  p.seed = seed;
  return p;
}

class ForestModel final : public Model {
 public:
  ForestModel(std::vector<DecisionTree> trees, int n_classes) : trees_(std::move(trees)), n_classes_(n_classes) {}

  Eigen::MatrixXd scores(const FeatureMatrix& x) const override {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), n_classes_);
    for (const auto& tree : trees_) {
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const auto& v = tree.leaf_value(x.row(r));
        for (int c = 0; c < n_classes_; ++c) out(r, c) += v[static_cast<std::size_t>(c)];
      }
    }
    return out / static_cast<double>(trees_.size());
  }

  bool probabilistic() const override { return true; }

 private:
  std::vector<DecisionTree> trees_;
  int n_classes_;
};

std::vector<std::size_t> weighted_rows(const std::vector<double>& weights) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) rows.push_back(i);
  return rows;
}

}  // namespace

DecisionTree DecisionTree::fit_classifier(const FeatureMatrix& x, const Labels& y, const std::vector<double>& weights,
                                          int n_classes, const TreeParams& params) {
  Builder<GiniStats, Labels> builder(x, y, weights, GiniStats(n_classes), params);
  DecisionTree tree;
  tree.nodes_ = builder.build(weighted_rows(weights));
  return tree;
}

DecisionTree DecisionTree::fit_regressor(const FeatureMatrix& x, const std::vector<double>& target,
                                         const TreeParams& params) {
  const std::vector<double> ones(target.size(), 1.0);
  Builder<SseStats, std::vector<double>> builder(x, target, ones, SseStats{}, params);
  DecisionTree tree;
  tree.nodes_ = builder.build(weighted_rows(ones));
  return tree;
}

int DecisionTree::leaf_index(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int node = 0;
  while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& n = nodes_[static_cast<std::size_t>(node)];
    node = row(n.feature) <= n.threshold ? n.left : n.right;
  }
  return node;
}

std::unique_ptr<Model> train_dt(const ClassifierSpec& spec, const FeatureMatrix& x, const Labels& y, int n_classes) {
  const std::vector<double> weights(y.size(), 1.0);
  std::vector<DecisionTree> trees;
  trees.push_back(DecisionTree::fit_classifier(x, y, weights, n_classes, tree_params(spec, spec.seed)));
  return std::make_unique<ForestModel>(std::move(trees), n_classes);
}

// Tree t is seeded with the forest seed for t = 0 and derive_seed(seed, t)
// after that; bootstrap samples enter the tree as multiplicity weights.
std::unique_ptr<Model> train_rf(const ClassifierSpec& spec, const FeatureMatrix& x, const Labels& y, int n_classes) {
  const int n_trees = static_cast<int>(spec.get("n_trees", 100));
  const bool bootstrap = spec.get("bootstrap", 1) != 0;
  const auto n = y.size();
  std::vector<DecisionTree> trees;
  trees.reserve(static_cast<std::size_t>(n_trees));
  for (int t = 0; t < n_trees; ++t) {
    const std::uint64_t seed = t == 0 ? spec.seed : derive_seed(spec.seed, static_cast<std::uint64_t>(t));
    TreeParams params = tree_params(spec, seed);
    if (params.max_features <= 0) {
      params.max_features = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(x.cols())))));
    }
    std::vector<double> weights(n, 1.0);
    if (bootstrap) {
      std::fill(weights.begin(), weights.end(), 0.0);
      Rng draw(derive_seed(seed, 0xB007));
      for (std::size_t i = 0; i < n; ++i) weights[draw.below(n)] += 1.0;
    }
    trees.push_back(DecisionTree::fit_classifier(x, y, weights, n_classes, params));
  }
  return std::make_unique<ForestModel>(std::move(trees), n_classes);
}

}  // namespace reqfuse::detail
