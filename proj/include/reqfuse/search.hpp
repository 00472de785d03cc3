#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "reqfuse/classifier.hpp"
#include "reqfuse/provenance.hpp"
#include "reqfuse/random.hpp"

namespace reqfuse {

/// Either a list of discrete choices or a continuous [lo, hi] range.
struct ParamRange {
  std::vector<double> choices;
  double lo = 0.0;
  double hi = 0.0;
  bool log = false;
  bool integer = false;

  static ParamRange choice(std::vector<double> values) { return {std::move(values), 0.0, 0.0, false, false}; }
  static ParamRange uniform(double lo, double hi, bool log = false, bool integer = false) {
    return {{}, lo, hi, log, integer};
  }
  double sample(Rng& rng) const;
};

using HyperparamSpace = std::map<std::string, ParamRange>;

/// Search spaces used when a config asks for search without giving one.
HyperparamSpace default_space(Algorithm algo);

enum class Objective { PositiveF1, MacroF1, Accuracy };

std::string_view to_string(Objective objective) noexcept;
Objective parse_objective(std::string_view name);

struct Trial {
  int index = 0;
  Hyperparams params;  // sampled values only
  double objective = -std::numeric_limits<double>::infinity();
  std::string error;   // non-empty when the trial failed
};

struct SearchResult {
  ClassifierSpec best;
  std::vector<Trial> trials;
  Provenance touched;  // row ids the search fitted or scored on
};

struct SearchRequest {
  ClassifierSpec base;
  HyperparamSpace space;
  int budget = 20;
  Objective objective = Objective::PositiveF1;
  int inner_folds = 3;
  int positive_label = 0;
  std::uint64_t seed = 0;
};

/// Seeded random search. Each of `budget` sampled specs is scored by inner
/// stratified cross-validation over the given rows; the best objective wins
/// and ties go to the earlier trial. `row_ids` names the rows for auditing.
SearchResult search_hyperparams(const SearchRequest& request, const FeatureMatrix& x, const std::vector<int>& y,
                                const std::vector<std::string>& row_ids);

/// `trial,<param>...,objective`; failed trials carry an empty objective.
void write_trial_log(const SearchResult& result, std::ostream& out);

}  // namespace reqfuse
