#include <algorithm>
#include <cmath>

#include "models.hpp"

namespace reqfuse::detail {
namespace {

int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

class AdaBoostModel final : public Model {
 public:
  AdaBoostModel(std::vector<DecisionTree> stumps, std::vector<double> alphas, int n_classes)
      : stumps_(std::move(stumps)), alphas_(std::move(alphas)), n_classes_(n_classes) {}

  // Alpha-weighted votes, normalized to sum to one per row.
  Eigen::MatrixXd scores(const FeatureMatrix& x) const override {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), n_classes_);
    double total = 0.0;
    for (std::size_t m = 0; m < stumps_.size(); ++m) {
      total += alphas_[m];
      for (Eigen::Index r = 0; r < x.rows(); ++r) out(r, argmax(stumps_[m].leaf_value(x.row(r)))) += alphas_[m];
    }
    return total > 0.0 ? Eigen::MatrixXd(out / total) : out;
  }

  bool probabilistic() const override { return false; }

 private:
  std::vector<DecisionTree> stumps_;
  std::vector<double> alphas_;
  int n_classes_;
};

class GradientBoostingModel final : public Model {
 public:
  GradientBoostingModel(Eigen::RowVectorXd init, std::vector<std::vector<DecisionTree>> rounds, double lr,
                        int n_classes, std::vector<double> trace)
      : init_(std::move(init)), rounds_(std::move(rounds)), lr_(lr), n_classes_(n_classes), trace_(std::move(trace)) {}

  Eigen::MatrixXd raw(const FeatureMatrix& x) const {
    Eigen::MatrixXd f = init_.replicate(x.rows(), 1);
    for (const auto& round : rounds_) {
      for (std::size_t k = 0; k < round.size(); ++k) {
        for (Eigen::Index r = 0; r < x.rows(); ++r)
          f(r, static_cast<Eigen::Index>(k)) += lr_ * round[k].leaf_value(x.row(r))[0];
      }
    }
    return f;
  }

  Eigen::MatrixXd scores(const FeatureMatrix& x) const override { return to_proba(raw(x), n_classes_); }

  bool probabilistic() const override { return true; }
  std::vector<double> training_trace() const override { return trace_; }

  static Eigen::MatrixXd to_proba(const Eigen::MatrixXd& f, int n_classes) {
    if (n_classes > 2) return softmax_rows(f);
    Eigen::MatrixXd p(f.rows(), 2);
    for (Eigen::Index r = 0; r < f.rows(); ++r) {
      p(r, 1) = 1.0 / (1.0 + std::exp(-f(r, 0)));
      p(r, 0) = 1.0 - p(r, 1);
    }
    return p;
  }

 private:
  Eigen::RowVectorXd init_;
  std::vector<std::vector<DecisionTree>> rounds_;
  double lr_;
  int n_classes_;
  std::vector<double> trace_;
};

double log_loss(const Eigen::MatrixXd& proba, const Labels& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    total -= std::log(std::max(proba(static_cast<Eigen::Index>(i), y[i]), 1e-15));
  return total / static_cast<double>(y.size());
}

}  // namespace

// Multi-class AdaBoost (SAMME) over depth-1 trees.
std::unique_ptr<Model> train_adaboost(const ClassifierSpec& spec, const FeatureMatrix& x, const Labels& y,
                                      int n_classes) {
  const int n_estimators = static_cast<int>(spec.get("n_estimators", 50));
  const double lr = spec.get("learning_rate", 1.0);
  const auto n = y.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  TreeParams stump;
  stump.max_depth = 1;
  stump.seed = spec.seed;

  std::vector<DecisionTree> stumps;
  std::vector<double> alphas;
  for (int m = 0; m < n_estimators; ++m) {
    DecisionTree tree = DecisionTree::fit_classifier(x, y, w, n_classes, stump);
    std::vector<bool> wrong(n);
    double err = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wrong[i] = argmax(tree.leaf_value(x.row(static_cast<Eigen::Index>(i)))) != y[i];
      if (wrong[i]) err += w[i];
      total += w[i];
    }
    err /= total;
    if (err <= 0.0) {
      stumps.push_back(std::move(tree));
      alphas.push_back(1.0);
      break;
    }
    if (err >= 1.0 - 1.0 / n_classes) {
      if (stumps.empty()) {
        stumps.push_back(std::move(tree));
        alphas.push_back(1.0);
      }
      break;
    }
    const double alpha = lr * (std::log((1.0 - err) / err) + std::log(n_classes - 1.0));
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (wrong[i]) w[i] *= std::exp(alpha);
      sum += w[i];
    }
    for (double& wi : w) wi /= sum;
    stumps.push_back(std::move(tree));
    alphas.push_back(alpha);
  }
  return std::make_unique<AdaBoostModel>(std::move(stumps), std::move(alphas), n_classes);
}

// Gradient boosting on the log-loss with regression trees and one Newton step
// per leaf. Binary problems use a single logit; multi-class fits one tree per
// class per round.
std::unique_ptr<Model> train_gboost(const ClassifierSpec& spec, const FeatureMatrix& x, const Labels& y,
                                    int n_classes) {
  const int n_estimators = static_cast<int>(spec.get("n_estimators", 100));
  const double lr = spec.get("learning_rate", 0.1);
  TreeParams params;
  params.max_depth = static_cast<int>(spec.get("max_depth", 3));
  params.min_samples_leaf = static_cast<int>(spec.get("min_samples_leaf", 1));
  params.seed = spec.seed;

  const auto n = static_cast<Eigen::Index>(y.size());
  const bool binary = n_classes == 2;
  const int outputs = binary ? 1 : n_classes;

  std::vector<double> prior(static_cast<std::size_t>(n_classes), 0.0);
  for (int label : y) prior[static_cast<std::size_t>(label)] += 1.0 / static_cast<double>(n);
  Eigen::RowVectorXd init(outputs);
  if (binary) {
    const double p = std::clamp(prior[1], 1e-12, 1.0 - 1e-12);
    init(0) = std::log(p / (1.0 - p));
  } else {
    for (int k = 0; k < n_classes; ++k) init(k) = std::log(std::max(prior[static_cast<std::size_t>(k)], 1e-12));
  }

  Eigen::MatrixXd f = init.replicate(n, 1);
  std::vector<std::vector<DecisionTree>> rounds;
  std::vector<double> trace;
  for (int m = 0; m < n_estimators; ++m) {
    const Eigen::MatrixXd proba = GradientBoostingModel::to_proba(f, n_classes);
    std::vector<DecisionTree> round;
    for (int k = 0; k < outputs; ++k) {
      const int cls = binary ? 1 : k;
      std::vector<double> residual(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i)
        residual[static_cast<std::size_t>(i)] = (y[static_cast<std::size_t>(i)] == cls ? 1.0 : 0.0) - proba(i, cls);
      DecisionTree tree = DecisionTree::fit_regressor(x, residual, params);

      std::vector<double> num(tree.nodes().size(), 0.0);
      std::vector<double> den(tree.nodes().size(), 0.0);
      std::vector<int> leaf_of(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        const int leaf = tree.leaf_index(x.row(i));
        const double r = residual[static_cast<std::size_t>(i)];
        leaf_of[static_cast<std::size_t>(i)] = leaf;
        num[static_cast<std::size_t>(leaf)] += r;
        den[static_cast<std::size_t>(leaf)] += binary ? proba(i, 1) * (1.0 - proba(i, 1)) : std::abs(r) * (1.0 - std::abs(r));
      }
      const double scale = binary ? 1.0 : (n_classes - 1.0) / n_classes;
      for (std::size_t node = 0; node < tree.nodes().size(); ++node) {
        auto& nd = tree.nodes()[node];
        if (nd.feature >= 0) continue;
        nd.value = {den[node] < 1e-12 ? 0.0 : scale * num[node] / den[node]};
      }
      for (Eigen::Index i = 0; i < n; ++i)
        f(i, k) += lr * tree.nodes()[static_cast<std::size_t>(leaf_of[static_cast<std::size_t>(i)])].value[0];
      round.push_back(std::move(tree));
    }
    rounds.push_back(std::move(round));
    trace.push_back(log_loss(GradientBoostingModel::to_proba(f, n_classes), y));
  }
  return std::make_unique<GradientBoostingModel>(std::move(init), std::move(rounds), lr, n_classes, std::move(trace));
}

}  // namespace reqfuse::detail
