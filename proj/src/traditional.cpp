#include "reqfuse/traditional.hpp"

#include <algorithm>

#include "reqfuse/error.hpp"
#include "reqfuse/random.hpp"

namespace reqfuse {
namespace {

constexpr std::array<LatentKind, 3> kKinds = {LatentKind::LSI, LatentKind::NMF, LatentKind::LDA};

std::size_t slot(LatentKind kind, Representation rep) {
  return static_cast<std::size_t>(rep) * 3 + static_cast<std::size_t>(kind);
}

const LatentParams& params_for(const TraditionalConfig& cfg, LatentKind kind) {
  switch (kind) {
    case LatentKind::LSI: return cfg.lsi;
    case LatentKind::NMF: return cfg.nmf;
    case LatentKind::LDA: return cfg.lda;
  }
  return cfg.lsi;
}

}  // namespace

TraditionalScorer TraditionalScorer::fit(const std::vector<std::string>& training_texts,
                                         const TraditionalConfig& config, Provenance provenance, bool with_tfidf,
                                         bool with_bm25) {
  TraditionalScorer scorer;
  scorer.config_ = config;
  std::vector<TokenList> docs;
  docs.reserve(training_texts.size());
  for (const auto& text : training_texts) docs.push_back(tokenize(text, config.tokenize));
  scorer.stats_ = fit_corpus_stats(docs, provenance);
  if (scorer.stats_.vocab_size() == 0) throw Error(ErrorCode::EmptyCorpus, "training corpus has no terms");

  for (Representation rep : {Representation::TFIDF, Representation::BM25}) {
    if ((rep == Representation::TFIDF && !with_tfidf) || (rep == Representation::BM25 && !with_bm25)) continue;
    std::vector<SparseTermVector> matrix;
    matrix.reserve(docs.size());
    for (const auto& doc : docs) {
      matrix.push_back(rep == Representation::TFIDF ? tfidf_vector(doc, scorer.stats_, config.tfidf)
                                                    : bm25_vector(doc, scorer.stats_, config.bm25));
    }
    for (LatentKind kind : kKinds) {
      LatentParams params = params_for(config, kind);
      params.k = std::clamp<std::size_t>(params.k, 1, std::min(matrix.size(), scorer.stats_.vocab_size()));
      params.seed = derive_seed(config.seed, slot(kind, rep));
      scorer.models_[slot(kind, rep)] = fit_latent(kind, matrix, params, provenance);
    }
  }
  return scorer;
}

bool TraditionalScorer::has(Representation rep) const noexcept {
  return models_[slot(LatentKind::LSI, rep)].has_value();
}

const LatentModel& TraditionalScorer::model(LatentKind kind, Representation rep) const {
  const auto& m = models_[slot(kind, rep)];
  if (!m) throw Error(ErrorCode::MissingBlock, std::string(to_string(rep)) + " models were not fitted");
  return *m;
}

std::vector<const Provenance*> TraditionalScorer::provenances() const {
  std::vector<const Provenance*> out{&stats_.provenance()};
  for (const auto& m : models_)
    if (m) out.push_back(&m->provenance());
  return out;
}

SparseTermVector TraditionalScorer::vectorize(std::string_view text, Representation rep) const {
  const auto tokens = tokenize(text, config_.tokenize);
  return rep == Representation::TFIDF ? tfidf_vector(tokens, stats_, config_.tfidf)
                                      : bm25_vector(tokens, stats_, config_.bm25);
}

DocumentProfile TraditionalScorer::profile(std::string_view text) const {
  DocumentProfile profile;
  for (Representation rep : {Representation::TFIDF, Representation::BM25}) {
    if (!has(rep)) continue;
    RepresentationProfile p;
    p.vector = vectorize(text, rep);
    if (!p.vector.empty()) {
      p.lsi = model(LatentKind::LSI, rep).project(p.vector);
      p.nmf = model(LatentKind::NMF, rep).project(p.vector);
      p.lda = model(LatentKind::LDA, rep).project(p.vector);
    }
    (rep == Representation::TFIDF ? profile.tfidf : profile.bm25) = std::move(p);
  }
  return profile;
}

SimilarityBlock TraditionalScorer::block(const DocumentProfile& a, const DocumentProfile& b,
                                         Representation rep) const {
  const auto& pa = rep == Representation::TFIDF ? a.tfidf : a.bm25;
  const auto& pb = rep == Representation::TFIDF ? b.tfidf : b.bm25;
  if (!pa || !pb) throw Error(ErrorCode::MissingBlock, std::string(to_string(rep)) + " profile missing");

  using M = SimilarityMethod;
  SimilarityBlock out{};
  auto put = [&](const SimilarityScore& s) { out[static_cast<std::size_t>(s.method)] = s.value; };

  const auto vsm = vsm_similarity(pa->vector, pb->vector, rep);
  const auto js = js_similarity(pa->vector, pb->vector, rep);
  const bool empty = pa->vector.empty() || pb->vector.empty();
  const SimilarityScore lsi{empty ? 0.0 : dense_cosine(pa->lsi, pb->lsi), M::LSI, rep};
  const SimilarityScore nmf{empty ? 0.0 : dense_cosine(pa->nmf, pb->nmf), M::NMF, rep};
  const SimilarityScore lda{empty ? 0.0 : std::clamp(1.0 - jensen_shannon_divergence(pa->lda, pb->lda), 0.0, 1.0),
                            M::LDA, rep};
  for (const auto& s : {vsm, lsi, js, nmf, lda}) put(s);
  put(hybrid_similarity(M::NMF_LDA, nmf, lda));
  put(hybrid_similarity(M::JS_LDA, js, lda));
  put(hybrid_similarity(M::VSM_NMF, vsm, nmf));
  put(hybrid_similarity(M::JS_NMF, js, nmf));
  put(hybrid_similarity(M::VSM_JS, vsm, js));
  return out;
}

TraditionalSimVector TraditionalScorer::score(const DocumentProfile& a, const DocumentProfile& b) const {
  TraditionalSimVector out{};
  const auto t = block(a, b, Representation::TFIDF);
  const auto m = block(a, b, Representation::BM25);
  std::copy(t.begin(), t.end(), out.begin());
  std::copy(m.begin(), m.end(), out.begin() + kMethodCount);
  return out;
}

TraditionalSimVector TraditionalScorer::score(std::string_view left, std::string_view right) const {
  return score(profile(left), profile(right));
}

TraditionalSimVector traditional_vector(const RequirementPair& pair, const TraditionalScorer& scorer) {
  return scorer.score(pair.left.text, pair.right.text);
}

}  // namespace reqfuse
