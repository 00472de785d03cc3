#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reqfuse/classifier.hpp"
#include "reqfuse/corpus.hpp"
#include "reqfuse/metrics.hpp"
#include "reqfuse/provenance.hpp"

namespace reqfuse {

/// What one fold produced: predictions for its test pairs and the
/// provenance of every artifact fitted along the way.
struct FoldOutcome {
  std::vector<std::string> test_ids;
  std::vector<int> y_true;
  std::vector<int> y_pred;
  std::vector<Provenance> fitted;
  std::optional<Hyperparams> chosen;  // search winner, when a search ran
};

class FoldRunner {
 public:
  virtual ~FoldRunner() = default;
  /// Fits on `train` and predicts `test` (dataset positions).
  virtual FoldOutcome run_fold(const PairDataset& ds, const std::vector<std::size_t>& train,
                               const std::vector<std::size_t>& test, int fold, std::uint64_t seed) = 0;
};

/// Summary of one metric across folds.
struct CvSummary {
  Aggregate precision;
  Aggregate recall;
  Aggregate f1;
};

struct CvResult {
  FoldPlan plan;
  std::vector<MetricReport> folds;
  std::vector<FoldOutcome> outcomes;
  CvSummary positive;
  CvSummary macro;
  Aggregate accuracy;
};

/// Metric classes for a dataset: its positive class and Neutral, ascending.
std::vector<int> metric_classes(const PairDataset& ds);

/// Throws LeakageDetected when any fitted artifact saw a test id.
void check_leakage(const FoldOutcome& outcome, int fold);

/// Runs every fold of `plan`, checks leakage, and aggregates per-fold metrics
/// as mean and sample standard deviation. Fold f receives
/// derive_seed(model_seed, f).
CvResult cross_validate(FoldRunner& runner, const PairDataset& ds, const FoldPlan& plan, std::uint64_t model_seed,
                        MacroF1 mode = MacroF1::Harmonic);

CvResult summarize(const PairDataset& ds, FoldPlan plan, std::vector<FoldOutcome> outcomes, MacroF1 mode);

/// Externally produced predictions (`fold,pair_id,label`), e.g. from a
/// fine-tuned model. Every dataset pair must appear exactly once.
CvResult evaluate_predictions(const PairDataset& ds, const std::string& predictions_csv_path,
                              MacroF1 mode = MacroF1::Harmonic);
CvResult evaluate_predictions_text(const PairDataset& ds, std::string_view text, MacroF1 mode = MacroF1::Harmonic);

}  // namespace reqfuse
