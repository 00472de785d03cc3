#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "reqfuse/classifier.hpp"
#include "reqfuse/fusion.hpp"
#include "reqfuse/llm_store.hpp"
#include "reqfuse/metrics.hpp"
#include "reqfuse/search.hpp"
#include "reqfuse/traditional.hpp"

namespace reqfuse {

enum class Family { Similarity, Hybrid };

std::string_view to_string(Family family) noexcept;

struct SearchConfig {
  bool enabled = false;
  int budget = 20;
  Objective objective = Objective::PositiveF1;
  int folds = 3;
  HyperparamSpace space;  // empty means default_space(algo)
};

struct PipelineConfig {
  Family family = Family::Similarity;
  FusionStrategy fusion{true, true, true, 0};
  std::optional<LlmModel> cls_model;
  ClassifierSpec classifier{Algorithm::MLP, {}, {}, 0};
  SearchConfig search;
  TraditionalConfig traditional;
  int cv_k = 3;
  std::optional<std::uint64_t> cv_seed;  // fold assignment seed; defaults to seed
  /// Fixed seed for the latent models in every fold; by default it is derived
  /// from the fold seed.
  std::optional<std::uint64_t> sim_seed;
  MacroF1 macro_f1 = MacroF1::Harmonic;
  std::uint64_t seed = 0;
  std::string dataset;  // pairs CSV path
  std::string store;    // store JSONL path

  std::uint64_t fold_seed() const noexcept { return cv_seed.value_or(seed); }
};

/// Accepts nested objects or dotted keys ("rep.bm25.k1": 1.2). Unknown keys
/// and malformed values raise BadConfig.
PipelineConfig parse_config(const nlohmann::json& doc);
PipelineConfig parse_config_text(std::string_view text);
PipelineConfig load_config(const std::string& path);

/// Fully resolved config, every key present, as nested JSON.
nlohmann::json to_json(const PipelineConfig& cfg);

/// Merges `overlay` into `base`, flattening dotted keys on both sides first.
nlohmann::json merge_config(const nlohmann::json& base, const nlohmann::json& overlay);

}  // namespace reqfuse
