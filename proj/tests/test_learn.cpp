#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "oracles.hpp"
#include "reqfuse/classifier.hpp"
#include "reqfuse/error.hpp"
#include "reqfuse/search.hpp"

using namespace reqfuse;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no reqfuse::Error thrown";
  return ErrorCode::Io;
}

double accuracy(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hit += a[i] == b[i];
  return static_cast<double>(hit) / static_cast<double>(a.size());
}

ClassifierSpec spec_for(Algorithm algo, Hyperparams params = {}, std::uint64_t seed = 7) {
  ClassifierSpec s;
  s.algo = algo;
  s.params = std::move(params);
  s.seed = seed;
  return s;
}

FeatureMatrix random_rows(std::uint64_t seed, Eigen::Index n, Eigen::Index d) {
  Rng rng(seed);
  FeatureMatrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.uniform(-5, 5);
  return x;
}

// Three classes in 3-d, used for the multiclass checks.
oracle::Blobs three_blobs() {
  Rng rng(21);
  oracle::Blobs b;
  b.x.resize(150, 3);
  const double centres[3][3] = {{3, 0, 0}, {0, 3, 0}, {0, 0, 3}};
  for (Eigen::Index i = 0; i < 150; ++i) {
    const int c = static_cast<int>(i % 3);
    for (Eigen::Index j = 0; j < 3; ++j) b.x(i, j) = rng.normal(centres[c][j], 0.6);
    b.y.push_back(c);
  }
  return b;
}

}  // namespace

class NativeClassifier : public ::testing::TestWithParam<Algorithm> {};

TEST_P(NativeClassifier, BlobsAccuracyFloor) {
  const auto blobs = oracle::blobs(200, 2.0, 7);
  const auto model = fit(spec_for(GetParam()), blobs.x, blobs.y);
  EXPECT_GE(accuracy(model.predict(blobs.x), blobs.y), 0.95);
}

TEST_P(NativeClassifier, ScoresAgreeWithPredict) {
  const auto blobs = oracle::blobs(200, 2.0, 7);
  const auto model = fit(spec_for(GetParam()), blobs.x, blobs.y);
  const auto x = random_rows(100, 100, 2);
  const auto scores = model.predict_scores(x);
  ASSERT_EQ(scores.rows(), 100);
  ASSERT_EQ(scores.cols(), 2);
  const auto pred = model.predict(x);
  const auto arg = row_argmax(scores);
  for (std::size_t i = 0; i < pred.size(); ++i) EXPECT_EQ(pred[i], model.classes()[static_cast<std::size_t>(arg[i])]);
  if (model.model().probabilistic()) {
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      EXPECT_NEAR(scores.row(i).sum(), 1.0, 1e-6);
      EXPECT_GE(scores.row(i).minCoeff(), 0.0);
      EXPECT_LE(scores.row(i).maxCoeff(), 1.0);
    }
  }
}

TEST_P(NativeClassifier, FitAndPredictAreBitStable) {
  const auto blobs = oracle::blobs(120, 1.0, 3);
  const auto a = fit(spec_for(GetParam()), blobs.x, blobs.y);
  const auto b = fit(spec_for(GetParam()), blobs.x, blobs.y);
  const auto x = random_rows(5, 60, 2);
  EXPECT_EQ(a.predict_scores(x), b.predict_scores(x));
  EXPECT_EQ(a.predict(x), a.predict(x));
}

TEST_P(NativeClassifier, ThreeClasses) {
  const auto data = three_blobs();
  const auto model = fit(spec_for(GetParam()), data.x, data.y);
  EXPECT_EQ(model.classes(), (std::vector<int>{0, 1, 2}));
  EXPECT_GE(accuracy(model.predict(data.x), data.y), 0.9);
}

TEST_P(NativeClassifier, InputContract) {
  const auto blobs = oracle::blobs(40);
  const auto spec = spec_for(GetParam());
  EXPECT_EQ(code_of([&] { fit(spec, blobs.x, std::vector<int>(40, 1)); }), ErrorCode::SingleClass);
  auto bad = blobs.x;
  bad(3, 1) = std::nan("");
  EXPECT_EQ(code_of([&] { fit(spec, bad, blobs.y); }), ErrorCode::NonFinite);
  EXPECT_EQ(code_of([&] { fit(spec, FeatureMatrix(40, 0), blobs.y); }), ErrorCode::DimZero);
  const auto model = fit(spec, blobs.x, blobs.y);
  EXPECT_EQ(code_of([&] { model.predict(random_rows(1, 3, 5)); }), ErrorCode::DimMismatch);
}

INSTANTIATE_TEST_SUITE_P(All, NativeClassifier, ::testing::ValuesIn(kNativeAlgorithms),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Knn, OneNeighbourMemorizesTrainingSet) {
  const auto blobs = oracle::blobs(200, 0.0, 11);  // overlapping classes
  const auto model = fit(spec_for(Algorithm::KNN, {{"k", 1}}), blobs.x, blobs.y);
  EXPECT_EQ(model.predict(blobs.x), blobs.y);
}

TEST(Knn, DistanceTieGoesToLowerLabel) {
  FeatureMatrix x(2, 1);
  x << -1, 1;
  const auto model = fit(spec_for(Algorithm::KNN, {{"k", 1}}), x, {5, 3});
  FeatureMatrix q(1, 1);
  q << 0;
  EXPECT_EQ(model.predict(q), (std::vector<int>{3}));
}

TEST(Gnb, OneDimensionalThresholdNearMidpoint) {
  Rng rng(5);
  FeatureMatrix x(100, 1);
  std::vector<int> y;
  for (Eigen::Index i = 0; i < 100; ++i) {
    const int c = i < 50 ? 0 : 1;
    x(i, 0) = rng.normal(c == 0 ? 0.0 : 10.0, 1.0);
    y.push_back(c);
  }
  const auto model = fit(spec_for(Algorithm::GNB), x, y);
  FeatureMatrix grid(1001, 1);
  for (Eigen::Index i = 0; i <= 1000; ++i) grid(i, 0) = -2.0 + 0.014 * static_cast<double>(i);
  const auto pred = model.predict(grid);
  int switches = 0;
  double threshold = 0.0;
  for (std::size_t i = 1; i < pred.size(); ++i) {
    if (pred[i] != pred[i - 1]) {
      ++switches;
      threshold = grid(static_cast<Eigen::Index>(i), 0);
    }
  }
  EXPECT_EQ(switches, 1);
  EXPECT_GE(threshold, 4.0);
  EXPECT_LE(threshold, 6.0);
}

TEST(Logr, SeparableTrainingAccuracy) {
  const auto blobs = oracle::blobs(200, 2.0, 7);
  const auto model = fit(spec_for(Algorithm::LOGR), blobs.x, blobs.y);
  EXPECT_GE(accuracy(model.predict(blobs.x), blobs.y), 0.99);
}

TEST(Forest, SingleUnbaggedTreeEqualsDecisionTree) {
  const auto data = oracle::blobs(150, 0.5, 9);
  for (double depth : {0.0, 2.0, 4.0}) {
    const Hyperparams tree{{"max_depth", depth}, {"max_features", 1}, {"min_samples_leaf", 2}};
    Hyperparams forest = tree;
    forest["n_trees"] = 1;
    forest["bootstrap"] = 0;
    const auto dt = fit(spec_for(Algorithm::DT, tree, 99), data.x, data.y);
    const auto rf = fit(spec_for(Algorithm::RF, forest, 99), data.x, data.y);
    const auto x = random_rows(8, 200, 2);
    EXPECT_EQ(dt.predict_scores(x), rf.predict_scores(x)) << depth;
  }
}

TEST(Adaboost, ThresholdSeparableWithinFiveRounds) {
  FeatureMatrix x(40, 1);
  std::vector<int> y;
  for (Eigen::Index i = 0; i < 40; ++i) {
    x(i, 0) = static_cast<double>(i) * 0.37;
    y.push_back(x(i, 0) > 6.1 ? 1 : 0);
  }
  const auto model = fit(spec_for(Algorithm::ADABOOST, {{"n_estimators", 5}}), x, y);
  EXPECT_EQ(model.predict(x), y);
}

TEST(Gboost, TrainingLossNonIncreasing) {
  const auto blobs = oracle::blobs(200, 2.0, 7);
  const auto model = fit(spec_for(Algorithm::GBOOST), blobs.x, blobs.y);
  const auto trace = model.model().training_trace();
  ASSERT_EQ(trace.size(), 100u);
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-12) << i;

  const auto three = three_blobs();
  const auto multi = fit(spec_for(Algorithm::GBOOST, {{"n_estimators", 30}}), three.x, three.y).model().training_trace();
  for (std::size_t i = 1; i < multi.size(); ++i) EXPECT_LE(multi[i], multi[i - 1] + 1e-12) << i;
}

TEST(Mlp, DifferentSeedsDifferentWeights) {
  const auto blobs = oracle::blobs(100, 1.0, 2);
  const auto x = random_rows(1, 20, 2);
  const auto a = fit(spec_for(Algorithm::MLP, {{"epochs", 20}}, 1), blobs.x, blobs.y).predict_scores(x);
  const auto b = fit(spec_for(Algorithm::MLP, {{"epochs", 20}}, 2), blobs.x, blobs.y).predict_scores(x);
  EXPECT_NE(a, b);
}

TEST(Hyperparams, Validation) {
  EXPECT_EQ(code_of([] { validate(spec_for(Algorithm::KNN, {{"k", 0}})); }), ErrorCode::BadHyperparam);
  EXPECT_EQ(code_of([] { validate(spec_for(Algorithm::KNN, {{"k", 2.5}})); }), ErrorCode::BadHyperparam);
  EXPECT_EQ(code_of([] { validate(spec_for(Algorithm::RF, {{"n_trees", 0}})); }), ErrorCode::BadHyperparam);
  EXPECT_EQ(code_of([] { validate(spec_for(Algorithm::MLP, {{"layers", 0}})); }), ErrorCode::BadHyperparam);
  EXPECT_EQ(code_of([] { validate(spec_for(Algorithm::LOGR, {{"momentum", 0.5}})); }), ErrorCode::BadHyperparam);
  for (auto algo : kNativeAlgorithms) EXPECT_NO_THROW(validate(spec_for(algo, default_hyperparams(algo))));
  for (auto algo : kNativeAlgorithms) EXPECT_EQ(parse_algorithm(to_string(algo)), algo);
}

namespace {

struct ConstantModel : Model {
  Eigen::MatrixXd scores(const FeatureMatrix& x) const override {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(x.rows(), 2);
    s.col(1).setOnes();
    return s;
  }
  bool probabilistic() const override { return true; }
};

}  // namespace

TEST(Plugins, RegisteredAdapterIsUsed) {
  register_plugin("always_one", [](const ClassifierSpec&, const FeatureMatrix&, const std::vector<int>&, int) {
    return std::make_unique<ConstantModel>();
  });
  EXPECT_TRUE(has_plugin("always_one"));
  ClassifierSpec spec;
  spec.algo = Algorithm::Plugin;
  spec.plugin = "always_one";
  const auto blobs = oracle::blobs(20);
  const auto model = fit(spec, blobs.x, blobs.y);
  EXPECT_EQ(model.predict(blobs.x), std::vector<int>(20, 1));
  spec.plugin = "unregistered";
  EXPECT_EQ(code_of([&] { fit(spec, blobs.x, blobs.y); }), ErrorCode::UnknownAlgorithm);
}

namespace {

std::vector<std::string> ids_for(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
  return ids;
}

}  // namespace

TEST(Search, BudgetOneReturnsTheSampledSpec) {
  const auto blobs = oracle::blobs(60);
  SearchRequest req;
  req.base = spec_for(Algorithm::KNN);
  req.space = {{"k", ParamRange::uniform(1, 15, false, true)}};
  req.budget = 1;
  req.seed = 4;
  const auto result = search_hyperparams(req, blobs.x, blobs.y, ids_for(60));
  ASSERT_EQ(result.trials.size(), 1u);
  EXPECT_EQ(result.best.params.at("k"), result.trials[0].params.at("k"));
  EXPECT_EQ(result.best.algo, Algorithm::KNN);
}

TEST(Search, DominantChoiceWins) {
  FeatureMatrix x(6, 1);
  x << 0.0, 0.1, 0.2, 10.0, 10.1, 10.2;
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  SearchRequest req;
  req.base = spec_for(Algorithm::KNN);
  req.space = {{"k", ParamRange::choice({101, 1})}};
  req.budget = 6;
  req.positive_label = 1;
  req.seed = 1;
  const auto result = search_hyperparams(req, x, y, ids_for(6));
  EXPECT_EQ(result.best.params.at("k"), 1.0);
}

TEST(Search, SameSeedSameTrialsAndLog) {
  const auto blobs = oracle::blobs(80, 0.0, 5);
  SearchRequest req;
  req.base = spec_for(Algorithm::DT);
  req.space = default_space(Algorithm::DT);
  req.budget = 5;
  req.objective = Objective::MacroF1;
  req.seed = 12;
  const auto a = search_hyperparams(req, blobs.x, blobs.y, ids_for(80));
  const auto b = search_hyperparams(req, blobs.x, blobs.y, ids_for(80));
  ASSERT_EQ(a.trials.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(a.trials[i].params, b.trials[i].params);
    EXPECT_EQ(a.trials[i].objective, b.trials[i].objective);
  }
  EXPECT_EQ(a.best.params, b.best.params);
  std::ostringstream la, lb;
  write_trial_log(a, la);
  write_trial_log(b, lb);
  EXPECT_EQ(la.str(), lb.str());
  EXPECT_EQ(la.str().substr(0, 6), "trial,");
  EXPECT_EQ(a.touched.ids().size(), 80u);
}

TEST(Search, ContractErrors) {
  const auto blobs = oracle::blobs(30);
  SearchRequest req;
  req.base = spec_for(Algorithm::KNN);
  EXPECT_EQ(code_of([&] { search_hyperparams(req, blobs.x, blobs.y, ids_for(30)); }), ErrorCode::EmptySpace);
  req.space = {{"k", ParamRange::uniform(5, 1)}};
  EXPECT_EQ(code_of([&] { search_hyperparams(req, blobs.x, blobs.y, ids_for(30)); }), ErrorCode::EmptySpace);
  req.space = {{"k", ParamRange::choice({1})}};
  req.budget = 0;
  EXPECT_EQ(code_of([&] { search_hyperparams(req, blobs.x, blobs.y, ids_for(30)); }), ErrorCode::InvalidArgument);
}

TEST(Search, SampledValuesStayInRange) {
  Rng rng(3);
  const auto r = ParamRange::uniform(1e-4, 1e-1, true, false);
  const auto i = ParamRange::uniform(2, 9, false, true);
  for (int t = 0; t < 500; ++t) {
    const double a = r.sample(rng);
    EXPECT_GE(a, 1e-4);
    EXPECT_LE(a, 1e-1);
    const double b = i.sample(rng);
    EXPECT_EQ(b, std::round(b));
    EXPECT_GE(b, 2);
    EXPECT_LE(b, 9);
  }
  for (auto algo : kNativeAlgorithms) EXPECT_FALSE(default_space(algo).empty()) << to_string(algo);
}
