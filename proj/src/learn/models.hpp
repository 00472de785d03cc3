#pragma once

#include <memory>
#include <vector>

#include "reqfuse/classifier.hpp"
#include "reqfuse/random.hpp"

namespace reqfuse::detail {

using Labels = std::vector<int>;  // class indices

std::unique_ptr<Model> train_knn(const ClassifierSpec&, const FeatureMatrix&, const Labels&, int n_classes);
std::unique_ptr<Model> train_gnb(const ClassifierSpec&, const FeatureMatrix&, const Labels&, int n_classes);
std::unique_ptr<Model> train_bnb(const ClassifierSpec&, const FeatureMatrix&, const Labels&, int n_classes);
std::unique_ptr<Model> train_logr(const ClassifierSpec&, const FeatureMatrix&, const Labels&, int n_classes);
std::unique_ptr<Model> train_linsvm(const ClassifierSpec&, const FeatureMatrix&, const Labels&, int n_classes);
std::unique_ptr<Model> train_qda(const ClassifierSpec&, const FeatureMatrix&, const Labels&, int n_classes);
std::unique_ptr<Model> train_dt(const ClassifierSpec&, const FeatureMatrix&, const Labels&, int n_classes);
std::unique_ptr<Model> train_rf(const ClassifierSpec&, const FeatureMatrix&, const Labels&, int n_classes);
std::unique_ptr<Model> train_adaboost(const ClassifierSpec&, const FeatureMatrix&, const Labels&, int n_classes);
std::unique_ptr<Model> train_gboost(const ClassifierSpec&, const FeatureMatrix&, const Labels&, int n_classes);
std::unique_ptr<Model> train_mlp(const ClassifierSpec&, const FeatureMatrix&, const Labels&, int n_classes);

/// Per-feature z-scoring fitted on training rows; constant features keep scale 1.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const FeatureMatrix& x);
  FeatureMatrix apply(const FeatureMatrix& x) const;
};

/// Row-wise softmax computed with the max-subtraction trick.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

/// Inverse class frequency weights n / (C * n_c), or all ones.
std::vector<double> sample_weights(const Labels& y, int n_classes, bool balanced);

/// Binary CART node storage shared by the classification and regression trees.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> value;  // class distribution, or a single regression value
};

struct TreeParams {
  int max_depth = 0;  // 0 = unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  int max_features = 0;  // 0 = all
  std::uint64_t seed = 0;
};

class DecisionTree {
 public:
  /// Weighted Gini CART. Rows with zero weight are ignored.
  static DecisionTree fit_classifier(const FeatureMatrix& x, const Labels& y, const std::vector<double>& weights,
                                     int n_classes, const TreeParams& params);
  /// Squared-error CART on real targets.
  static DecisionTree fit_regressor(const FeatureMatrix& x, const std::vector<double>& target,
                                    const TreeParams& params);

  int leaf_index(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  const std::vector<double>& leaf_value(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    return nodes_[static_cast<std::size_t>(leaf_index(row))].value;
  }
  std::vector<TreeNode>& nodes() noexcept { return nodes_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace reqfuse::detail
