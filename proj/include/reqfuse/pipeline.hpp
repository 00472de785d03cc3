#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reqfuse/config.hpp"
#include "reqfuse/cross_validation.hpp"
#include "reqfuse/llm_store.hpp"

namespace reqfuse {

/// Train and test feature matrices for one fold.
struct FoldFeatures {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  FeatureMatrix x_train;
  FeatureMatrix x_test;
  std::vector<int> y_train;
  std::vector<int> y_test;
  std::vector<Provenance> fitted;  // representation, latent and PCA artifacts
};

/// A validated pipeline: representation fitting, fusion and classification
/// for a single fold at a time.
class Pipeline final : public FoldRunner {
 public:
  /// Loads the store named by the config when the fusion needs LLM knowledge.
  static Pipeline assemble(const PipelineConfig& cfg);
  /// Uses the given store. Throws MissingStore when one is needed but null,
  /// and BadConfig for inconsistent family / CLS settings.
  static Pipeline assemble(const PipelineConfig& cfg, std::shared_ptr<const EmbeddingStore> store);

  const PipelineConfig& config() const noexcept { return cfg_; }
  std::size_t feature_dim() const noexcept { return cfg_.fusion.dim(); }
  std::vector<std::string> columns() const { return column_names(cfg_.fusion); }

  FoldFeatures build_features(const PairDataset& ds, const std::vector<std::size_t>& train,
                              const std::vector<std::size_t>& test, std::uint64_t seed) const;

  FoldOutcome run_fold(const PairDataset& ds, const std::vector<std::size_t>& train,
                       const std::vector<std::size_t>& test, int fold, std::uint64_t seed) override;

 private:
  Pipeline(PipelineConfig cfg, std::shared_ptr<const EmbeddingStore> store)
      : cfg_(std::move(cfg)), store_(std::move(store)) {}

  PipelineConfig cfg_;
  std::shared_ptr<const EmbeddingStore> store_;
};

/// Stratified folds from the config's k and fold seed, then cross_validate.
CvResult evaluate(Pipeline& pipeline, const PairDataset& ds);

/// Writes fold<f>_train.csv and fold<f>_test.csv under `out_dir` with header
/// `pair_id,<feature columns>,label`. Returns the written paths.
std::vector<std::string> export_features(const Pipeline& pipeline, const PairDataset& ds, const FoldPlan& plan,
                                         const std::string& out_dir);

struct FeatureTable {
  std::vector<std::string> columns;  // feature columns only
  std::vector<std::string> pair_ids;
  FeatureMatrix x;
  std::vector<int> labels;
};

FeatureTable read_feature_csv(const std::string& path);

}  // namespace reqfuse
