#include "reqfuse/search.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "reqfuse/corpus.hpp"
#include "reqfuse/csv.hpp"
#include "reqfuse/error.hpp"
#include "reqfuse/metrics.hpp"

namespace reqfuse {

double ParamRange::sample(Rng& rng) const {
  if (!choices.empty()) return choices[rng.below(choices.size())];
  double v = log ? std::exp(rng.uniform(std::log(lo), std::log(hi))) : rng.uniform(lo, hi);
  if (integer) v = std::clamp(std::round(v), std::ceil(lo), std::floor(hi));
  return v;
}

HyperparamSpace default_space(Algorithm algo) {
  using R = ParamRange;
  switch (algo) {
    case Algorithm::KNN: return {{"k", R::choice({1, 3, 5, 7, 9, 15})}};
    case Algorithm::GNB: return {{"var_floor", R::uniform(1e-12, 1e-6, true)}};
    case Algorithm::BNB: return {{"alpha", R::uniform(0.01, 10, true)}, {"threshold", R::uniform(0.1, 0.9)}};
    case Algorithm::LOGR: return {{"l2", R::uniform(1e-6, 1e-1, true)}};
    case Algorithm::LINSVM: return {{"l2", R::uniform(1e-5, 1e-1, true)}};
    case Algorithm::QDA: return {{"ridge", R::uniform(1e-8, 1e-1, true)}};
    case Algorithm::DT:
      return {{"max_depth", R::choice({0, 3, 5, 8, 12})}, {"min_samples_leaf", R::uniform(1, 10, false, true)}};
    case Algorithm::RF:
      return {{"n_trees", R::choice({50, 100, 200})},
              {"max_depth", R::choice({0, 5, 10})},
              {"min_samples_leaf", R::uniform(1, 5, false, true)}};
    case Algorithm::ADABOOST:
      return {{"n_estimators", R::choice({25, 50, 100})}, {"learning_rate", R::uniform(0.1, 1.0, true)}};
    case Algorithm::GBOOST:
      return {{"n_estimators", R::choice({50, 100, 200})},
              {"learning_rate", R::uniform(0.03, 0.3, true)},
              {"max_depth", R::choice({2, 3, 4})}};
    case Algorithm::MLP:
      return {{"layers", R::choice({1, 2})},
              {"units", R::choice({16, 32, 64, 128})},
              {"lr", R::uniform(1e-3, 3e-2, true)},
              {"l2", R::uniform(1e-6, 1e-2, true)}};
    case Algorithm::Plugin: return {};
  }
  return {};
}

std::string_view to_string(Objective objective) noexcept {
  switch (objective) {
    case Objective::PositiveF1: return "positive_f1";
    case Objective::MacroF1: return "macro_f1";
    case Objective::Accuracy: return "accuracy";
  }
  return "?";
}

Objective parse_objective(std::string_view name) {
  for (auto o : {Objective::PositiveF1, Objective::MacroF1, Objective::Accuracy})
    if (to_string(o) == name) return o;
  throw Error(ErrorCode::BadConfig, "unknown search objective '" + std::string(name) + "'");
}

namespace {

FeatureMatrix rows_of(const FeatureMatrix& x, const std::vector<std::size_t>& rows) {
  FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

double score(Objective objective, const std::vector<int>& truth, const std::vector<int>& pred, int positive) {
  std::vector<int> classes = truth;
  classes.insert(classes.end(), pred.begin(), pred.end());
  classes.push_back(positive);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  const ConfusionMatrix cm = confusion(truth, pred, classes);
  switch (objective) {
    case Objective::PositiveF1: return standard_metrics(cm, positive).f1;
    case Objective::Accuracy: return static_cast<double>(cm.correct()) / static_cast<double>(cm.total);
    case Objective::MacroF1: {
      std::vector<PrF> per_class;
      for (const auto& c : cm.counts) per_class.push_back(standard_metrics(c.tp, c.fp, c.fn));
      return per_class.size() < 2 ? per_class.front().f1 : macro_metrics(per_class).f1;
    }
  }
  return 0.0;
}

}  // namespace

SearchResult search_hyperparams(const SearchRequest& request, const FeatureMatrix& x, const std::vector<int>& y,
                                const std::vector<std::string>& row_ids) {
  if (request.space.empty()) throw Error(ErrorCode::EmptySpace, "hyperparameter space is empty");
  for (const auto& [name, range] : request.space) {
    if (range.choices.empty() && !(range.lo <= range.hi))
      throw Error(ErrorCode::EmptySpace, "parameter '" + name + "' has an empty range");
    if (range.choices.empty() && range.log && range.lo <= 0.0)
      throw Error(ErrorCode::EmptySpace, "log-scaled parameter '" + name + "' needs a positive lower bound");
  }
  if (request.budget < 1) throw Error(ErrorCode::InvalidArgument, "search budget must be at least 1");
  if (static_cast<std::size_t>(x.rows()) != y.size() || row_ids.size() != y.size())
    throw Error(ErrorCode::LengthMismatch, "search inputs disagree in length");

  // Inner folds never exceed the smallest class count.
  std::map<int, int> per_label;
  for (int label : y) ++per_label[label];
  int smallest = static_cast<int>(y.size());
  for (const auto& [label, count] : per_label) smallest = std::min(smallest, count);
  const int k = std::min(request.inner_folds, smallest);
  if (k < 2) throw Error(ErrorCode::TooFewSamples, "inner cross-validation needs two members in every class");
  const std::vector<int> fold_of = stratified_fold_assignment(y, k, derive_seed(request.seed, 0x5EA));

  std::vector<std::vector<std::size_t>> train_rows(static_cast<std::size_t>(k));
  std::vector<std::vector<std::size_t>> test_rows(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (int f = 0; f < k; ++f) (fold_of[i] == f ? test_rows : train_rows)[static_cast<std::size_t>(f)].push_back(i);
  }

  SearchResult result;
  Rng rng(request.seed);
  int best = -1;
  for (int t = 0; t < request.budget; ++t) {
    Trial trial;
    trial.index = t;
    for (const auto& [name, range] : request.space) trial.params[name] = range.sample(rng);

    ClassifierSpec spec = request.base;
    for (const auto& [name, value] : trial.params) spec.params[name] = value;
    try {
      validate(spec);
      double total = 0.0;
      for (int f = 0; f < k; ++f) {
        const auto& tr = train_rows[static_cast<std::size_t>(f)];
        const auto& te = test_rows[static_cast<std::size_t>(f)];
        std::vector<int> y_tr, y_te;
        for (auto i : tr) y_tr.push_back(y[i]);
        for (auto i : te) y_te.push_back(y[i]);
        const TrainedClassifier model = fit(spec, rows_of(x, tr), y_tr);
        total += score(request.objective, y_te, model.predict(rows_of(x, te)), request.positive_label);
      }
      trial.objective = total / k;
    } catch (const std::exception& e) {
      trial.error = e.what();
    }
    if (trial.error.empty() && (best < 0 || trial.objective > result.trials[static_cast<std::size_t>(best)].objective))
      best = t;
    result.trials.push_back(std::move(trial));
  }
  if (best < 0) throw Error(ErrorCode::BadHyperparam, "every search trial failed: " + result.trials.front().error);

  result.best = request.base;
  for (const auto& [name, value] : result.trials[static_cast<std::size_t>(best)].params) result.best.params[name] = value;
  result.touched = Provenance(row_ids);
  return result;
}

void write_trial_log(const SearchResult& result, std::ostream& out) {
  csv::Row header{"trial"};
  if (!result.trials.empty())
    for (const auto& [name, value] : result.trials.front().params) header.push_back(name);
  header.push_back("objective");
  csv::write_row(out, header);
  for (const auto& trial : result.trials) {
    csv::Row row{std::to_string(trial.index)};
    for (const auto& [name, value] : trial.params) row.push_back(csv::format_double(value));
    row.push_back(trial.error.empty() ? csv::format_double(trial.objective) : "");
    csv::write_row(out, row);
  }
}

}  // namespace reqfuse
