#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <set>

#include "models.hpp"
#include "reqfuse/error.hpp"

namespace reqfuse {

std::string_view to_string(Algorithm algo) noexcept {
  switch (algo) {
    case Algorithm::KNN: return "KNN";
    case Algorithm::GNB: return "GNB";
    case Algorithm::BNB: return "BNB";
    case Algorithm::LOGR: return "LOGR";
    case Algorithm::LINSVM: return "LINSVM";
    case Algorithm::QDA: return "QDA";
    case Algorithm::DT: return "DT";
    case Algorithm::RF: return "RF";
    case Algorithm::ADABOOST: return "ADABOOST";
    case Algorithm::GBOOST: return "GBOOST";
    case Algorithm::MLP: return "MLP";
    case Algorithm::Plugin: return "PLUGIN";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Algorithm a : kNativeAlgorithms)
    if (to_string(a) == upper) return a;
  if (upper == "SVM") return Algorithm::LINSVM;
  if (upper == "QD") return Algorithm::QDA;
  return std::nullopt;
}

std::string ClassifierSpec::name() const {
  return algo == Algorithm::Plugin ? plugin : std::string(to_string(algo));
}

double ClassifierSpec::get(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Hyperparams default_hyperparams(Algorithm algo) {
  switch (algo) {
    case Algorithm::KNN: return {{"k", 5}};
    case Algorithm::GNB: return {{"var_floor", 1e-9}};
    case Algorithm::BNB: return {{"alpha", 1.0}, {"threshold", 0.5}};
    case Algorithm::LOGR:
      return {{"l2", 1e-4}, {"lr", 1.0}, {"max_iter", 2000}, {"tol", 1e-6}, {"class_weight", 0}};
    case Algorithm::LINSVM: return {{"l2", 1e-3}, {"lr", 0.5}, {"max_iter", 1000}, {"class_weight", 0}};
    case Algorithm::QDA: return {{"ridge", 1e-6}};
    case Algorithm::DT:
      return {{"max_depth", 0}, {"min_samples_split", 2}, {"min_samples_leaf", 1}, {"max_features", 0}};
    case Algorithm::RF:
      return {{"n_trees", 100}, {"max_depth", 0}, {"min_samples_split", 2}, {"min_samples_leaf", 1},
              {"max_features", 0}, {"bootstrap", 1}};
    case Algorithm::ADABOOST: return {{"n_estimators", 50}, {"learning_rate", 1.0}};
    case Algorithm::GBOOST:
      return {{"n_estimators", 100}, {"learning_rate", 0.1}, {"max_depth", 3}, {"min_samples_leaf", 1}};
    case Algorithm::MLP:
      return {{"layers", 1}, {"units", 64},   {"epochs", 200}, {"batch_size", 32},
              {"lr", 0.01},  {"momentum", 0.9}, {"l2", 1e-4}, {"class_weight", 0}};
    case Algorithm::Plugin: return {};
  }
  return {};
}

namespace {

struct Rule {
  double lo;
  double hi;
  bool integer;
};

// Allowed ranges; integer parameters must hold whole numbers.
std::map<std::string, Rule> rules_for(Algorithm algo) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (algo) {
    case Algorithm::KNN: return {{"k", {1, inf, true}}};
    case Algorithm::GNB: return {{"var_floor", {0, inf, false}}};
    case Algorithm::BNB: return {{"alpha", {1e-12, inf, false}}, {"threshold", {0, 1, false}}};
    case Algorithm::LOGR:
      return {{"l2", {0, inf, false}},
              {"lr", {1e-12, inf, false}},
              {"max_iter", {1, inf, true}},
              {"tol", {0, inf, false}},
              {"class_weight", {0, 1, true}}};
    case Algorithm::LINSVM:
      return {{"l2", {1e-12, inf, false}},
              {"lr", {1e-12, inf, false}},
              {"max_iter", {1, inf, true}},
              {"class_weight", {0, 1, true}}};
    case Algorithm::QDA: return {{"ridge", {0, inf, false}}};
    case Algorithm::DT:
      return {{"max_depth", {0, inf, true}},
              {"min_samples_split", {2, inf, true}},
              {"min_samples_leaf", {1, inf, true}},
              {"max_features", {0, inf, true}}};
    case Algorithm::RF:
      return {{"n_trees", {1, inf, true}},          {"max_depth", {0, inf, true}},
              {"min_samples_split", {2, inf, true}}, {"min_samples_leaf", {1, inf, true}},
              {"max_features", {0, inf, true}},      {"bootstrap", {0, 1, true}}};
    case Algorithm::ADABOOST: return {{"n_estimators", {1, inf, true}}, {"learning_rate", {1e-12, inf, false}}};
    case Algorithm::GBOOST:
      return {{"n_estimators", {1, inf, true}},
              {"learning_rate", {1e-12, inf, false}},
              {"max_depth", {1, inf, true}},
              {"min_samples_leaf", {1, inf, true}}};
    case Algorithm::MLP:
      return {{"layers", {1, inf, true}},   {"units", {1, inf, true}},     {"epochs", {1, inf, true}},
              {"batch_size", {1, inf, true}}, {"lr", {1e-12, inf, false}}, {"momentum", {0, 0.999999, false}},
              {"l2", {0, inf, false}},        {"class_weight", {0, 1, true}}};
    case Algorithm::Plugin: return {};
  }
  return {};
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, PluginTrainer>& registry() {
  static std::map<std::string, PluginTrainer> r;
  return r;
}

}  // namespace

void validate(const ClassifierSpec& spec) {
  if (spec.algo == Algorithm::Plugin) {
    if (!has_plugin(spec.plugin)) throw Error(ErrorCode::UnknownAlgorithm, "no plugin named '" + spec.plugin + "'");
    return;
  }
  const auto rules = rules_for(spec.algo);
  for (const auto& [key, value] : spec.params) {
    auto it = rules.find(key);
    if (it == rules.end()) {
      throw Error(ErrorCode::BadHyperparam, spec.name() + " has no hyperparameter '" + key + "'");
    }
    const Rule& r = it->second;
    if (!std::isfinite(value) || value < r.lo || value > r.hi || (r.integer && value != std::floor(value))) {
      throw Error(ErrorCode::BadHyperparam, spec.name() + "." + key + " = " + std::to_string(value) + " out of range");
    }
  }
}

std::vector<int> row_argmax(const Eigen::MatrixXd& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c)
      if (scores(r, c) > scores(r, best)) best = c;
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

Eigen::MatrixXd TrainedClassifier::predict_scores(const FeatureMatrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != dim_) {
    throw Error(ErrorCode::DimMismatch, "classifier fitted on " + std::to_string(dim_) + " features, got " +
                                            std::to_string(x.cols()));
  }
  return model_->scores(x);
}

std::vector<int> TrainedClassifier::predict(const FeatureMatrix& x) const {
  auto idx = row_argmax(predict_scores(x));
  for (auto& i : idx) i = classes_[static_cast<std::size_t>(i)];
  return idx;
}

TrainedClassifier fit(const ClassifierSpec& spec, const FeatureMatrix& x, const std::vector<int>& y) {
  validate(spec);
  if (x.cols() == 0) throw Error(ErrorCode::DimZero, "feature matrix has no columns");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(x.rows()) + " rows vs " + std::to_string(y.size()) + " labels");
  }
  if (y.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples");
  if (!x.allFinite()) throw Error(ErrorCode::NonFinite, "feature matrix holds NaN or infinity");

  std::vector<int> classes(y.begin(), y.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw Error(ErrorCode::SingleClass, "training labels contain a single class");

  detail::Labels idx(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    idx[i] = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin());
  const int c = static_cast<int>(classes.size());

  std::unique_ptr<Model> model;
  switch (spec.algo) {
    case Algorithm::KNN: model = detail::train_knn(spec, x, idx, c); break;
    case Algorithm::GNB: model = detail::train_gnb(spec, x, idx, c); break;
    case Algorithm::BNB: model = detail::train_bnb(spec, x, idx, c); break;
    case Algorithm::LOGR: model = detail::train_logr(spec, x, idx, c); break;
    case Algorithm::LINSVM: model = detail::train_linsvm(spec, x, idx, c); break;
    case Algorithm::QDA: model = detail::train_qda(spec, x, idx, c); break;
    case Algorithm::DT: model = detail::train_dt(spec, x, idx, c); break;
    case Algorithm::RF: model = detail::train_rf(spec, x, idx, c); break;
    case Algorithm::ADABOOST: model = detail::train_adaboost(spec, x, idx, c); break;
    case Algorithm::GBOOST: model = detail::train_gboost(spec, x, idx, c); break;
    case Algorithm::MLP: model = detail::train_mlp(spec, x, idx, c); break;
    case Algorithm::Plugin: {
      PluginTrainer trainer;
      {
        std::lock_guard lock(registry_mutex());
        trainer = registry().at(spec.plugin);
      }
      model = trainer(spec, x, idx, c);
      if (!model) throw Error(ErrorCode::UnknownAlgorithm, "plugin '" + spec.plugin + "' returned no model");
      break;
    }
  }
  return TrainedClassifier(spec, std::move(classes), static_cast<std::size_t>(x.cols()), std::move(model));
}

void register_plugin(const std::string& name, PluginTrainer trainer) {
  if (parse_algorithm(name)) throw Error(ErrorCode::InvalidArgument, "'" + name + "' is a native algorithm name");
  if (!trainer) throw Error(ErrorCode::InvalidArgument, "empty plugin trainer");
  std::lock_guard lock(registry_mutex());
  registry()[name] = std::move(trainer);
}

bool has_plugin(const std::string& name) {
  std::lock_guard lock(registry_mutex());
  return registry().contains(name);
}

std::vector<std::string> plugin_names() {
  std::lock_guard lock(registry_mutex());
  std::vector<std::string> names;
  for (const auto& [name, t] : registry()) names.push_back(name);
  return names;
}

namespace detail {

Standardizer Standardizer::fit(const FeatureMatrix& x) {
  Standardizer s;
  s.mean = x.colwise().mean();
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().mean();
    s.scale(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return s;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& x) const {
  return (x.rowwise() - mean).array().rowwise() / scale.array();
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - m).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

std::vector<double> sample_weights(const Labels& y, int n_classes, bool balanced) {
  std::vector<double> w(y.size(), 1.0);
  if (!balanced) return w;
  std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
  for (int c : y) counts[static_cast<std::size_t>(c)] += 1.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    w[i] = static_cast<double>(y.size()) / (n_classes * counts[static_cast<std::size_t>(y[i])]);
  return w;
}

}  // namespace detail
}  // namespace reqfuse
