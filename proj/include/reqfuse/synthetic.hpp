#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "reqfuse/corpus.hpp"
#include "reqfuse/llm_store.hpp"

namespace reqfuse {

struct SyntheticOptions {
  std::size_t pairs = 400;
  double duplicate_fraction = 0.3;
  /// Probability that each replaceable word of a duplicate is swapped for a synonym.
  double substitution_rate = 0.5;
  /// Standard deviation of the noise added to surrogate similarity scores.
  double score_noise = 0.1;
  std::size_t cls_dim = 16;
  double cls_noise = 0.3;
  std::uint64_t seed = 7;
};

/// Labelled pairs plus a store of surrogate model outputs.
///
/// Duplicates rewrite a base sentence through a synonym table and shuffle its
/// word order; neutral pairs join sentences built from two different
/// templates. Each model's similarity score is a monotone function of token
/// overlap plus Gaussian noise; CLS vectors place the overlap along a
/// model-specific direction plus isotropic noise.
struct SyntheticCorpus {
  PairDataset dataset;
  EmbeddingStore store;
};

SyntheticCorpus make_synthetic(const SyntheticOptions& options = {});

/// Jaccard overlap of the lowercased token sets.
double token_overlap(std::string_view a, std::string_view b);

}  // namespace reqfuse
