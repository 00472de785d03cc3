#include "reqfuse/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "reqfuse/corpus.hpp"
#include "reqfuse/csv.hpp"
#include "reqfuse/error.hpp"

namespace reqfuse {
namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double harmonic(double a, double b) { return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b); }

std::size_t position(const std::vector<int>& classes, int label) {
  auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) throw Error(ErrorCode::UnknownLabel, "label " + std::to_string(label) + " not in class list");
  return static_cast<std::size_t>(it - classes.begin());
}

std::string class_name(int label) {
  if (label >= 0 && label < kLabelCount) return std::string(to_string(static_cast<PairLabel>(label)));
  return std::to_string(label);
}

}  // namespace

const ClassCounts& ConfusionMatrix::of(int label) const { return counts[position(classes, label)]; }

std::int64_t ConfusionMatrix::correct() const {
  std::int64_t sum = 0;
  for (const auto& c : counts) sum += c.tp;
  return sum;
}

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                          const std::vector<int>& classes) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw Error(ErrorCode::LengthMismatch, "y_true has " + std::to_string(y_true.size()) + " labels, y_pred has " +
                                               std::to_string(y_pred.size()));
  }
  ConfusionMatrix cm;
  cm.classes = classes;
  const std::size_t m = classes.size();
  cm.cells.assign(m, std::vector<std::int64_t>(m, 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.cells[position(classes, y_true[i])][position(classes, y_pred[i])];
  cm.total = static_cast<std::int64_t>(y_true.size());
  for (std::size_t c = 0; c < m; ++c) {
    ClassCounts cc;
    cc.label = classes[c];
    cc.tp = cm.cells[c][c];
    for (std::size_t o = 0; o < m; ++o) {
      if (o == c) continue;
      cc.fn += cm.cells[c][o];
      cc.fp += cm.cells[o][c];
    }
    cc.tn = cm.total - cc.tp - cc.fp - cc.fn;
    cm.counts.push_back(cc);
  }
  return cm;
}

PrF standard_metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  PrF out;
  out.precision = ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
  out.recall = ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

PrF standard_metrics(const ConfusionMatrix& cm, int positive_label) {
  const auto& c = cm.of(positive_label);
  return standard_metrics(c.tp, c.fp, c.fn);
}

std::string_view to_string(MacroF1 mode) noexcept {
  return mode == MacroF1::Harmonic ? "harmonic" : "per_class_mean";
}

MacroF1 parse_macro_f1(std::string_view name) {
  if (name == "harmonic") return MacroF1::Harmonic;
  if (name == "per_class_mean") return MacroF1::PerClassMean;
  throw Error(ErrorCode::BadConfig, "metrics.macro_f1 must be harmonic or per_class_mean, got '" +
                                        std::string(name) + "'");
}

PrF macro_metrics(std::span<const PrF> per_class, MacroF1 mode) {
  if (per_class.size() < 2) throw Error(ErrorCode::InvalidArgument, "macro metrics need at least two classes");
  PrF out;
  double f1_sum = 0.0;
  for (const auto& p : per_class) {
    out.precision += p.precision;
    out.recall += p.recall;
    f1_sum += p.f1;
  }
  const auto m = static_cast<double>(per_class.size());
  out.precision /= m;
  out.recall /= m;
  out.f1 = mode == MacroF1::Harmonic ? harmonic(out.precision, out.recall) : f1_sum / m;
  return out;
}

const PrF& MetricReport::of(int label) const { return per_class[position(classes, label)]; }

MetricReport metric_report(const ConfusionMatrix& cm, int positive_label, MacroF1 mode) {
  MetricReport r;
  r.classes = cm.classes;
  r.positive_label = positive_label;
  for (const auto& c : cm.counts) {
    r.per_class.push_back(standard_metrics(c.tp, c.fp, c.fn));
    r.support.push_back(c.support());
  }
  r.macro = macro_metrics(r.per_class, mode);
  r.accuracy = ratio(static_cast<double>(cm.correct()), static_cast<double>(cm.total));
  return r;
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  if (values.empty()) return a;
  for (double v : values) a.mean += v;
  a.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return a;
}

void write_metric_csv(const std::vector<MetricReport>& folds, std::ostream& out) {
  csv::write_row(out, {"fold", "class", "precision", "recall", "f1", "support"});
  auto row = [&](const std::string& fold, const std::string& cls, const PrF& m, const std::string& support) {
    csv::write_row(out, {fold, cls, csv::format_double(m.precision), csv::format_double(m.recall),
                         csv::format_double(m.f1), support});
  };
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& r = folds[f];
    std::int64_t total = 0;
    for (std::size_t c = 0; c < r.classes.size(); ++c) {
      row(std::to_string(f), class_name(r.classes[c]), r.per_class[c], std::to_string(r.support[c]));
      total += r.support[c];
    }
    row(std::to_string(f), "macro", r.macro, std::to_string(total));
  }
  if (folds.empty()) return;

  // Summary rows: per-class entries (by position of the first fold) and macro.
  const auto& first = folds.front();
  auto summarize = [&](auto pick) {
    std::vector<double> p, rc, f1;
    for (const auto& r : folds) {
      const PrF m = pick(r);
      p.push_back(m.precision);
      rc.push_back(m.recall);
      f1.push_back(m.f1);
    }
    return std::array<Aggregate, 3>{aggregate(p), aggregate(rc), aggregate(f1)};
  };
  for (const char* stat : {"mean", "std"}) {
    const bool mean = std::string_view(stat) == "mean";
    auto emit = [&](const std::string& cls, const std::array<Aggregate, 3>& a) {
      const PrF m = mean ? PrF{a[0].mean, a[1].mean, a[2].mean} : PrF{a[0].std, a[1].std, a[2].std};
      row(stat, cls, m, "");
    };
    for (std::size_t c = 0; c < first.classes.size(); ++c) {
      const int label = first.classes[c];
      emit(class_name(label), summarize([&](const MetricReport& r) { return r.of(label); }));
    }
    emit("macro", summarize([](const MetricReport& r) { return r.macro; }));
  }
}

}  // namespace reqfuse
