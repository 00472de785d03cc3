#include "reqfuse/cross_validation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "reqfuse/csv.hpp"
#include "reqfuse/error.hpp"
#include "reqfuse/random.hpp"

namespace reqfuse {

std::vector<int> metric_classes(const PairDataset& ds) {
  std::vector<int> classes{static_cast<int>(ds.positive_class()), static_cast<int>(PairLabel::Neutral)};
  std::sort(classes.begin(), classes.end());
  return classes;
}

void check_leakage(const FoldOutcome& outcome, int fold) {
  for (const auto& prov : outcome.fitted) {
    for (const auto& id : outcome.test_ids) {
      if (prov.contains(id)) {
        throw Error(ErrorCode::LeakageDetected,
                    "fold " + std::to_string(fold) + ": test pair '" + id + "' was used to fit an artifact");
      }
    }
  }
}

CvResult summarize(const PairDataset& ds, FoldPlan plan, std::vector<FoldOutcome> outcomes, MacroF1 mode) {
  CvResult result;
  result.plan = std::move(plan);
  const auto classes = metric_classes(ds);
  const int positive = static_cast<int>(ds.positive_class());
  std::vector<double> pp, pr, pf, mp, mr, mf, acc;
  for (const auto& o : outcomes) {
    MetricReport r = metric_report(confusion(o.y_true, o.y_pred, classes), positive, mode);
    pp.push_back(r.positive().precision);
    pr.push_back(r.positive().recall);
    pf.push_back(r.positive().f1);
    mp.push_back(r.macro.precision);
    mr.push_back(r.macro.recall);
    mf.push_back(r.macro.f1);
    acc.push_back(r.accuracy);
    result.folds.push_back(std::move(r));
  }
  result.positive = {aggregate(pp), aggregate(pr), aggregate(pf)};
  result.macro = {aggregate(mp), aggregate(mr), aggregate(mf)};
  result.accuracy = aggregate(acc);
  result.outcomes = std::move(outcomes);
  return result;
}

CvResult cross_validate(FoldRunner& runner, const PairDataset& ds, const FoldPlan& plan, std::uint64_t model_seed,
                        MacroF1 mode) {
  std::vector<FoldOutcome> outcomes;
  for (int f = 0; f < plan.k; ++f) {
    const auto train = plan.train_indices(f);
    const auto test = plan.test_indices(f);
    FoldOutcome o = runner.run_fold(ds, train, test, f, derive_seed(model_seed, static_cast<std::uint64_t>(f)));
    if (o.test_ids.empty()) {
      for (auto i : test) o.test_ids.push_back(ds[i].pair_id);
    }
    check_leakage(o, f);
    outcomes.push_back(std::move(o));
  }
  return summarize(ds, plan, std::move(outcomes), mode);
}

CvResult evaluate_predictions_text(const PairDataset& ds, std::string_view text, MacroF1 mode) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "predictions file is empty");
  const csv::Row expected{"fold", "pair_id", "label"};
  if (rows[0] != expected) throw Error(ErrorCode::MissingColumn, "predictions header must be fold,pair_id,label");

  FoldPlan plan;
  plan.pair_ids.reserve(ds.size());
  for (const auto& p : ds.pairs()) plan.pair_ids.push_back(p.pair_id);
  plan.fold_of.assign(ds.size(), -1);
  std::vector<int> predicted(ds.size(), -1);
  int max_fold = -1;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "predictions row " + std::to_string(r + 1);
    if (row.size() != 3) throw Error(ErrorCode::MalformedRecord, where + ": expected 3 fields");
    int fold = 0;
    try {
      std::size_t used = 0;
      fold = std::stoi(row[0], &used);
      if (used != row[0].size() || fold < 0) throw std::invalid_argument("fold");
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedRecord, where + ": bad fold '" + row[0] + "'");
    }
    auto idx = ds.index_of(row[1]);
    if (!idx) throw Error(ErrorCode::MalformedRecord, where + ": unknown pair '" + row[1] + "'");
    if (plan.fold_of[*idx] >= 0) throw Error(ErrorCode::DuplicatePairId, where + ": pair '" + row[1] + "' repeated");
    auto label = parse_label(row[2]);
    if (!label) throw Error(ErrorCode::UnknownLabel, where + ": unknown label '" + row[2] + "'");
    plan.fold_of[*idx] = fold;
    predicted[*idx] = static_cast<int>(*label);
    max_fold = std::max(max_fold, fold);
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (plan.fold_of[i] < 0)
      throw Error(ErrorCode::MissingScore, "no prediction for pair '" + ds[i].pair_id + "'");
  }
  plan.k = max_fold + 1;

  std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(plan.k));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto& o = outcomes[static_cast<std::size_t>(plan.fold_of[i])];
    o.test_ids.push_back(ds[i].pair_id);
    o.y_true.push_back(static_cast<int>(ds[i].label));
    o.y_pred.push_back(predicted[i]);
  }
  for (std::size_t f = 0; f < outcomes.size(); ++f) {
    if (outcomes[f].test_ids.empty())
      throw Error(ErrorCode::MalformedRecord, "fold " + std::to_string(f) + " has no predictions");
  }
  return summarize(ds, std::move(plan), std::move(outcomes), mode);
}

CvResult evaluate_predictions(const PairDataset& ds, const std::string& predictions_csv_path, MacroF1 mode) {
  std::ifstream in(predictions_csv_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + predictions_csv_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return evaluate_predictions_text(ds, buf.str(), mode);
}

}  // namespace reqfuse
