#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace reqfuse {

/// One-vs-rest counts for a single class.
struct ClassCounts {
  int label = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t support() const noexcept { return tp + fn; }
};

struct ConfusionMatrix {
  std::vector<int> classes;
  std::vector<ClassCounts> counts;              // parallel to classes
  std::vector<std::vector<std::int64_t>> cells;  // cells[true][pred], indices into classes
  std::int64_t total = 0;

  const ClassCounts& of(int label) const;
  std::int64_t correct() const;
};

/// Throws LengthMismatch for unequal or empty inputs and UnknownLabel for a
/// label outside `classes`.
ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                          const std::vector<int>& classes);

struct PrF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// 0/0 is taken as 0 throughout.
PrF standard_metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn);
PrF standard_metrics(const ConfusionMatrix& cm, int positive_label);

enum class MacroF1 {
  Harmonic,      // harmonic mean of macro precision and macro recall
  PerClassMean,  // mean of the per-class F1 values
};

std::string_view to_string(MacroF1 mode) noexcept;
MacroF1 parse_macro_f1(std::string_view name);

/// Requires at least two classes.
PrF macro_metrics(std::span<const PrF> per_class, MacroF1 mode = MacroF1::Harmonic);

struct MetricReport {
  std::vector<int> classes;
  std::vector<PrF> per_class;
  std::vector<std::int64_t> support;
  PrF macro;
  double accuracy = 0.0;
  int positive_label = 0;

  const PrF& of(int label) const;
  const PrF& positive() const { return of(positive_label); }
};

MetricReport metric_report(const ConfusionMatrix& cm, int positive_label, MacroF1 mode = MacroF1::Harmonic);

/// Mean and sample standard deviation (0 for a single value).
struct Aggregate {
  double mean = 0.0;
  double std = 0.0;
};
Aggregate aggregate(std::span<const double> values);

/// `fold,class,precision,recall,f1,support`; one block per fold with a
/// `macro` row, then `mean` and `std` blocks over folds.
void write_metric_csv(const std::vector<MetricReport>& folds, std::ostream& out);

}  // namespace reqfuse
