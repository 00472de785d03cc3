#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reqfuse/llm_store.hpp"
#include "reqfuse/traditional.hpp"

namespace reqfuse {

enum class FeatureBlock { CLS, TFIDF, BM25, LLM };

std::string_view to_string(FeatureBlock block) noexcept;

/// Which feature groups a pipeline concatenates. Blocks always appear in the
/// order CLS, TFIDF, BM25, LLM.
struct FusionStrategy {
  bool tfidf = false;
  bool bm25 = false;
  bool llm = false;
  std::size_t cls_dim = 0;  // 0 = no CLS prefix

  /// Accepts e.g. "TFIDF+BM25+LLM" or "CLS(8)+TFIDF+BM25+LLM", case-insensitive.
  static FusionStrategy parse(std::string_view text);
  std::string name() const;
  std::size_t dim() const noexcept;
  bool has_cls() const noexcept { return cls_dim > 0; }
  /// The same strategy without its CLS prefix.
  FusionStrategy similarity_part() const noexcept { return {tfidf, bm25, llm, 0}; }

  friend bool operator==(const FusionStrategy&, const FusionStrategy&) = default;
};

/// The seven similarity-only strategies.
const std::array<FusionStrategy, 7>& similarity_strategies();

struct LayoutSpan {
  FeatureBlock block;
  std::size_t offset;
  std::size_t length;
};

struct FusedFeatureVector {
  std::vector<double> values;
  std::vector<LayoutSpan> layout;
};

struct FeatureInputs {
  std::optional<std::vector<double>> cls;
  std::optional<SimilarityBlock> tfidf;
  std::optional<SimilarityBlock> bm25;
  std::optional<LlmSimVector> llm;
};

/// Throws MissingBlock when a block named by the strategy is absent.
FusedFeatureVector fuse(const FusionStrategy& strategy, const FeatureInputs& inputs);

std::vector<LayoutSpan> layout_of(const FusionStrategy& strategy);
/// Column names derived from the layout, e.g. cls_0, tfidf_vsm, bm25_js_lda, llm_bert.
std::vector<std::string> column_names(const FusionStrategy& strategy);

}  // namespace reqfuse
