#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reqfuse/corpus.hpp"
#include "reqfuse/latent.hpp"
#include "reqfuse/similarity.hpp"
#include "reqfuse/textrep.hpp"

namespace reqfuse {

/// Ten TFIDF-based scores followed by ten BM25-based scores, each block in
/// SimilarityMethod order.
using TraditionalSimVector = std::array<double, 2 * kMethodCount>;
using SimilarityBlock = std::array<double, kMethodCount>;

struct TraditionalConfig {
  TokenizeOptions tokenize;
  TfidfParams tfidf;
  Bm25Params bm25;
  LatentParams lsi{.k = 100};
  LatentParams nmf{.k = 50, .max_iter = 200, .tol = 1e-4};
  LatentParams lda{.k = 20, .max_iter = 200, .alpha = 0.0, .beta = 0.01, .infer_sweeps = 50};
  std::uint64_t seed = 0;
};

/// Everything the scorer needs about one requirement under one representation.
struct RepresentationProfile {
  SparseTermVector vector;
  std::vector<double> lsi;
  std::vector<double> nmf;
  std::vector<double> lda;
};

struct DocumentProfile {
  std::optional<RepresentationProfile> tfidf;
  std::optional<RepresentationProfile> bm25;
};

/// Corpus statistics plus the six latent models (three kinds under two
/// representations), all fitted on one training corpus.
class TraditionalScorer {
 public:
  /// Latent ranks are clamped to min(#docs, vocabulary size). Model seeds are
  /// derived from `config.seed` and the (kind, representation) cell only.
  static TraditionalScorer fit(const std::vector<std::string>& training_texts, const TraditionalConfig& config,
                               Provenance provenance = {}, bool with_tfidf = true, bool with_bm25 = true);

  const TraditionalConfig& config() const noexcept { return config_; }
  const CorpusStats& stats() const noexcept { return stats_; }
  bool has(Representation rep) const noexcept;
  const LatentModel& model(LatentKind kind, Representation rep) const;
  std::vector<const Provenance*> provenances() const;

  SparseTermVector vectorize(std::string_view text, Representation rep) const;
  DocumentProfile profile(std::string_view text) const;

  SimilarityBlock block(const DocumentProfile& a, const DocumentProfile& b, Representation rep) const;
  TraditionalSimVector score(const DocumentProfile& a, const DocumentProfile& b) const;
  TraditionalSimVector score(std::string_view left, std::string_view right) const;

 private:
  TraditionalConfig config_;
  CorpusStats stats_;
  std::array<std::optional<LatentModel>, 6> models_;  // index: rep * 3 + kind
};

TraditionalSimVector traditional_vector(const RequirementPair& pair, const TraditionalScorer& scorer);

}  // namespace reqfuse
