#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reqfuse {

/// Rows are samples.
using FeatureMatrix = Eigen::MatrixXd;

enum class Algorithm { KNN, GNB, BNB, LOGR, LINSVM, QDA, DT, RF, ADABOOST, GBOOST, MLP, Plugin };

inline constexpr Algorithm kNativeAlgorithms[] = {
    Algorithm::KNN, Algorithm::GNB, Algorithm::BNB,      Algorithm::LOGR,   Algorithm::LINSVM, Algorithm::QDA,
    Algorithm::DT,  Algorithm::RF,  Algorithm::ADABOOST, Algorithm::GBOOST, Algorithm::MLP};

std::string_view to_string(Algorithm algo) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name);

using Hyperparams = std::map<std::string, double>;

struct ClassifierSpec {
  Algorithm algo = Algorithm::KNN;
  std::string plugin;  // registered adapter name when algo == Plugin
  Hyperparams params;
  std::uint64_t seed = 0;

  std::string name() const;
  double get(const std::string& key, double fallback) const;
};

/// Default value of every hyperparameter an algorithm accepts.
Hyperparams default_hyperparams(Algorithm algo);

/// Rejects unknown keys and out-of-range values with BadHyperparam.
void validate(const ClassifierSpec& spec);

/// Fitted, algorithm-specific state. Labels are class indices 0..C-1.
class Model {
 public:
  virtual ~Model() = default;
  /// n x C scores: probabilities for probabilistic models, margins otherwise.
  virtual Eigen::MatrixXd scores(const FeatureMatrix& x) const = 0;
  virtual bool probabilistic() const = 0;
  /// Per-iteration training diagnostics (GBOOST: log-loss after each round).
  virtual std::vector<double> training_trace() const { return {}; }
};

class TrainedClassifier {
 public:
  TrainedClassifier(ClassifierSpec spec, std::vector<int> classes, std::size_t dim, std::shared_ptr<const Model> model)
      : spec_(std::move(spec)), classes_(std::move(classes)), dim_(dim), model_(std::move(model)) {}

  const ClassifierSpec& spec() const noexcept { return spec_; }
  /// Original labels, ascending; column j of the scores refers to classes()[j].
  const std::vector<int>& classes() const noexcept { return classes_; }
  std::size_t dim() const noexcept { return dim_; }
  const Model& model() const noexcept { return *model_; }

  /// Argmax of the scores; ties resolve to the lower class index.
  std::vector<int> predict(const FeatureMatrix& x) const;
  Eigen::MatrixXd predict_scores(const FeatureMatrix& x) const;

 private:
  ClassifierSpec spec_;
  std::vector<int> classes_;
  std::size_t dim_;
  std::shared_ptr<const Model> model_;
};

TrainedClassifier fit(const ClassifierSpec& spec, const FeatureMatrix& x, const std::vector<int>& y);

/// External adapters (GP, XGBoost, CatBoost, ...) plug in here. The trainer
/// receives class indices 0..n_classes-1.
using PluginTrainer = std::function<std::unique_ptr<Model>(const ClassifierSpec& spec, const FeatureMatrix& x,
                                                           const std::vector<int>& y, int n_classes)>;
void register_plugin(const std::string& name, PluginTrainer trainer);
bool has_plugin(const std::string& name);
std::vector<std::string> plugin_names();

/// Index of the first maximum in each row.
std::vector<int> row_argmax(const Eigen::MatrixXd& scores);

}  // namespace reqfuse
