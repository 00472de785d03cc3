#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "oracles.hpp"
#include "reqfuse/config.hpp"
#include "reqfuse/error.hpp"
#include "reqfuse/pipeline.hpp"
#include "reqfuse/synthetic.hpp"

using namespace reqfuse;
using nlohmann::json;

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

const SyntheticCorpus& small_corpus() {
  static const SyntheticCorpus corpus = [] {
    SyntheticOptions o;
    o.pairs = 90;
    o.seed = 3;
    return make_synthetic(o);
  }();
  return corpus;
}

std::shared_ptr<const EmbeddingStore> small_store() {
  static const auto store = std::make_shared<const EmbeddingStore>(small_corpus().store);
  return store;
}

// Small latent models keep the fold fits quick.
json fast_base() {
  return {{"sim.lsi.k", 8},       {"sim.nmf.k", 5},  {"sim.nmf.max_iter", 60}, {"sim.lda.k", 4},
          {"sim.lda.sweeps", 40}, {"seed", 11},      {"classifier.algo", "LOGR"}};
}

PipelineConfig config_with(const json& overlay) { return parse_config(merge_config(fast_base(), overlay)); }

}  // namespace

TEST(Config, DefaultsAndResolvedJson) {
  const auto cfg = parse_config(json::object());
  EXPECT_EQ(cfg.family, Family::Similarity);
  EXPECT_EQ(cfg.fusion.name(), "TFIDF+BM25+LLM");
  EXPECT_EQ(cfg.classifier.algo, Algorithm::MLP);
  EXPECT_EQ(cfg.cv_k, 3);
  EXPECT_EQ(cfg.traditional.bm25.k1, 1.5);
  EXPECT_EQ(cfg.traditional.bm25.b, 0.75);
  EXPECT_EQ(cfg.traditional.lsi.k, 100u);
  EXPECT_EQ(cfg.traditional.nmf.k, 50u);
  EXPECT_EQ(cfg.traditional.lda.k, 20u);
  EXPECT_EQ(cfg.macro_f1, MacroF1::Harmonic);
  // resolved form parses back to the same resolved form
  EXPECT_EQ(to_json(parse_config(to_json(cfg))), to_json(cfg));
}

TEST(Config, NestedAndDottedKeysAgree) {
  const auto a = parse_config(json::parse(R"({"rep": {"bm25": {"k1": 1.2}}, "sim": {"lda": {"k": 7}}})"));
  const auto b = parse_config(json::parse(R"({"rep.bm25.k1": 1.2, "sim.lda.k": 7})"));
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(a.traditional.bm25.k1, 1.2);
  EXPECT_EQ(a.traditional.lda.k, 7u);
}

TEST(Config, ClassifierSearchAndSeeds) {
  const auto cfg = parse_config(json::parse(R"({
    "classifier": {"algo": "rf", "params": {"n_trees": 7}},
    "search": {"budget": 4, "objective": "macro_f1", "space": {"max_depth": [2, 4], "n_trees": {"lo": 5, "hi": 9, "integer": true}}},
    "cv": {"k": 5, "seed": 99}, "seed": 3, "sim.seed": 8, "metrics.macro_f1": "per_class_mean"})"));
  EXPECT_EQ(cfg.classifier.algo, Algorithm::RF);
  EXPECT_EQ(cfg.classifier.params.at("n_trees"), 7);
  EXPECT_TRUE(cfg.search.enabled);
  EXPECT_EQ(cfg.search.budget, 4);
  EXPECT_EQ(cfg.search.objective, Objective::MacroF1);
  EXPECT_EQ(cfg.search.space.at("max_depth").choices, (std::vector<double>{2, 4}));
  EXPECT_TRUE(cfg.search.space.at("n_trees").integer);
  EXPECT_EQ(cfg.cv_k, 5);
  EXPECT_EQ(cfg.fold_seed(), 99u);
  EXPECT_EQ(cfg.sim_seed, 8u);
  EXPECT_EQ(cfg.macro_f1, MacroF1::PerClassMean);
  EXPECT_EQ(parse_config(json{{"seed", 3}}).fold_seed(), 3u);
}

TEST(Config, BadConfigCases) {
  for (const char* text : {R"({"colour": 1})", R"({"rep.bm25.k3": 1})", R"({"family": "FINETUNED"})",
                           R"({"fusion": "TFIDF+GLOVE"})", R"({"cv.k": 1})", R"({"search.budget": 0})",
                           R"({"sim.lsi.k": 0})", R"({"seed": -4})", R"({"cls_model": "T5"})",
                           R"({"sim.lsi.max_iter": 3})"}) {
    EXPECT_EQ(code_of([&] { parse_config_text(text); }), ErrorCode::BadConfig) << text;
  }
  EXPECT_EQ(code_of([] { parse_config_text("{not json"); }), ErrorCode::BadConfig);
}

TEST(Config, HybridWithoutFusionDefaultsToSixteen) {
  const auto cfg = parse_config(json{{"family", "HYBRID"}, {"cls_model", "BERT"}});
  EXPECT_EQ(cfg.fusion.cls_dim, 16u);
  EXPECT_EQ(cfg.fusion.dim(), 46u);
}

TEST(Config, MergeOverlaysFlatKeys) {
  const json merged = merge_config(json::parse(R"({"rep": {"bm25": {"k1": 1.0, "b": 0.5}}})"),
                                   json::parse(R"({"rep.bm25.k1": 2.0})"));
  const auto cfg = parse_config(merged);
  EXPECT_EQ(cfg.traditional.bm25.k1, 2.0);
  EXPECT_EQ(cfg.traditional.bm25.b, 0.5);
}

TEST(Assemble, FeatureDims) {
  auto sim = Pipeline::assemble(config_with({{"fusion", "TFIDF+BM25+LLM"}}), small_store());
  EXPECT_EQ(sim.feature_dim(), 30u);
  auto hybrid = Pipeline::assemble(
      config_with({{"family", "HYBRID"}, {"fusion", "CLS(8)+TFIDF+BM25+LLM"}, {"cls_model", "BERT"}}), small_store());
  EXPECT_EQ(hybrid.feature_dim(), 38u);
  EXPECT_EQ(hybrid.columns().size(), 38u);
  EXPECT_EQ(hybrid.columns()[8], "tfidf_vsm");

  const auto& ds = small_corpus().dataset;
  const auto plan = stratified_kfold(ds, 3, 1);
  const auto f = hybrid.build_features(ds, plan.train_indices(0), plan.test_indices(0), 5);
  EXPECT_EQ(f.x_train.cols(), 38);
  EXPECT_EQ(f.x_test.cols(), 38);
  EXPECT_EQ(static_cast<std::size_t>(f.x_test.rows()), plan.test_indices(0).size());
}

TEST(Assemble, InconsistentConfigs) {
  EXPECT_EQ(code_of([] { Pipeline::assemble(config_with({{"family", "HYBRID"}, {"fusion", "TFIDF"}}), small_store()); }),
            ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] {
              Pipeline::assemble(config_with({{"family", "HYBRID"}, {"fusion", "CLS(8)+TFIDF"}}), small_store());
            }),
            ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] {
              Pipeline::assemble(
                  config_with({{"family", "HYBRID"}, {"fusion", "CLS(8)+TFIDF"}, {"cls_model", "BART"}}),
                  small_store());
            }),
            ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] {
              Pipeline::assemble(config_with({{"family", "SIMILARITY"}, {"fusion", "CLS(8)+TFIDF"}}), small_store());
            }),
            ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { Pipeline::assemble(config_with({{"classifier.algo", "NOT_REGISTERED"}}), small_store()); }),
            ErrorCode::UnknownAlgorithm);
}

TEST(Assemble, MissingStore) {
  EXPECT_EQ(code_of([] { Pipeline::assemble(config_with({{"fusion", "TFIDF+LLM"}}), nullptr); }),
            ErrorCode::MissingStore);
  EXPECT_EQ(code_of([] { Pipeline::assemble(config_with({{"fusion", "LLM"}, {"store", "/nonexistent/x.jsonl"}})); }),
            ErrorCode::MissingStore);
  EXPECT_NO_THROW(Pipeline::assemble(config_with({{"fusion", "TFIDF+BM25"}}), nullptr));
}

TEST(Evaluate, FoldArtifactsNeverSeeTestPairs) {
  const auto& ds = small_corpus().dataset;
  auto pipeline = Pipeline::assemble(
      config_with({{"family", "HYBRID"}, {"fusion", "CLS(8)+TFIDF+BM25+LLM"}, {"cls_model", "GPT"},
                   {"search.budget", 2}, {"search.space", {{"l2", {1e-4, 1e-2}}}}}),
      small_store());
  const auto result = evaluate(pipeline, ds);
  ASSERT_EQ(result.outcomes.size(), 3u);
  for (std::size_t f = 0; f < 3; ++f) {
    const auto& o = result.outcomes[f];
    // scorer stats + 6 latent models + PCA + search + classifier
    EXPECT_GE(o.fitted.size(), 10u);
    EXPECT_TRUE(o.chosen.has_value());
    for (const auto& prov : o.fitted) {
      EXPECT_FALSE(prov.empty());
      for (const auto& id : o.test_ids) EXPECT_FALSE(prov.contains(id)) << id;
    }
  }
}

TEST(Evaluate, SeparatesSyntheticDuplicates) {
  const auto& ds = small_corpus().dataset;
  auto pipeline = Pipeline::assemble(config_with(json::object()), small_store());
  const auto result = evaluate(pipeline, ds);
  EXPECT_GE(result.positive.f1.mean, 0.8);
  EXPECT_EQ(ds.positive_class(), PairLabel::Duplicate);
}

TEST(Evaluate, SameSeedSamePredictions) {
  const auto& ds = small_corpus().dataset;
  auto a = Pipeline::assemble(config_with({{"classifier.algo", "RF"}, {"classifier.params", {{"n_trees", 10}}}}),
                              small_store());
  auto b = Pipeline::assemble(config_with({{"classifier.algo", "RF"}, {"classifier.params", {{"n_trees", 10}}}}),
                              small_store());
  const auto ra = evaluate(a, ds);
  const auto rb = evaluate(b, ds);
  for (std::size_t f = 0; f < ra.outcomes.size(); ++f) EXPECT_EQ(ra.outcomes[f].y_pred, rb.outcomes[f].y_pred);
  EXPECT_EQ(ra.positive.f1.mean, rb.positive.f1.mean);
}

TEST(Evaluate, SimSeedPinsLatentModels) {
  const auto& ds = small_corpus().dataset;
  const auto plan = stratified_kfold(ds, 3, 2);
  auto p = Pipeline::assemble(config_with({{"fusion", "TFIDF"}, {"sim.seed", 5}}), small_store());
  const auto a = p.build_features(ds, plan.train_indices(0), plan.test_indices(0), 1);
  const auto b = p.build_features(ds, plan.train_indices(0), plan.test_indices(0), 2);
  EXPECT_EQ(a.x_test, b.x_test);
}

TEST(Export, FeatureCsvRoundTripsBitExactly) {
  const auto& ds = small_corpus().dataset;
  auto pipeline = Pipeline::assemble(
      config_with({{"family", "HYBRID"}, {"fusion", "CLS(16)+BM25+LLM"}, {"cls_model", "XLNet"}}), small_store());
  const auto plan = stratified_kfold(ds, 3, pipeline.config().fold_seed());
  oracle::TempDir dir("export");
  const auto paths = export_features(pipeline, ds, plan, dir.str());
  ASSERT_EQ(paths.size(), 6u);

  for (int f = 0; f < 3; ++f) {
    const auto want = pipeline.build_features(ds, plan.train_indices(f), plan.test_indices(f),
                                              derive_seed(pipeline.config().seed, static_cast<std::uint64_t>(f)));
    const auto train = read_feature_csv(dir.str("fold" + std::to_string(f) + "_train.csv"));
    const auto test = read_feature_csv(dir.str("fold" + std::to_string(f) + "_test.csv"));
    EXPECT_EQ(train.columns, pipeline.columns());
    EXPECT_EQ(train.pair_ids, want.train_ids);
    EXPECT_EQ(test.pair_ids, want.test_ids);
    EXPECT_EQ(train.x, want.x_train);
    EXPECT_EQ(test.x, want.x_test);
    EXPECT_EQ(test.labels, want.y_test);
  }
}
