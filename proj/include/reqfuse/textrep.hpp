#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reqfuse/provenance.hpp"

namespace reqfuse {

using TokenList = std::vector<std::string>;

struct TokenizeOptions {
  bool lowercase = true;
  bool remove_stopwords = false;
  bool stem = false;
};

/// Splits on every code point that is not a letter or digit, so punctuation-only
/// runs never become tokens. Non-ASCII letters are kept; Latin, Greek and
/// Cyrillic capitals are lowercased.
TokenList tokenize(std::string_view text, const TokenizeOptions& options = {});

/// Porter (1980) suffix stripping for lowercase ASCII words; other words pass through.
std::string porter_stem(std::string_view word);
bool is_stopword(std::string_view word);

/// Vocabulary and document statistics shared by the TFIDF and BM25 weightings.
class CorpusStats {
 public:
  std::size_t doc_count() const noexcept { return doc_count_; }
  std::size_t vocab_size() const noexcept { return terms_.size(); }
  double avg_doc_len() const noexcept { return avg_doc_len_; }

  std::optional<std::uint32_t> index_of(std::string_view term) const;
  const std::string& term(std::uint32_t index) const { return terms_.at(index); }
  std::size_t doc_freq(std::uint32_t index) const { return doc_freq_.at(index); }
  std::size_t doc_freq(std::string_view term) const;

  const Provenance& provenance() const noexcept { return provenance_; }

  friend CorpusStats fit_corpus_stats(const std::vector<TokenList>& docs, Provenance provenance);

 private:
  std::unordered_map<std::string, std::uint32_t> vocabulary_;
  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::size_t doc_count_ = 0;
  double avg_doc_len_ = 0.0;
  Provenance provenance_;
};

/// Vocabulary indices follow first occurrence across `docs` in order.
CorpusStats fit_corpus_stats(const std::vector<TokenList>& docs, Provenance provenance = {});

/// Sparse non-negative weights over a fitted vocabulary, sorted by index.
struct SparseTermVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool empty() const noexcept { return entries.empty(); }
  double norm() const;
  double sum() const;
  double at(std::uint32_t index) const;
  std::vector<double> to_dense() const;
};

struct TfidfParams {
  bool smooth_idf = true;
  bool sublinear_tf = false;
  bool l2_normalize = true;
};

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
};

double tfidf_idf(std::size_t doc_count, std::size_t doc_freq, bool smooth = true);
double bm25_idf(std::size_t doc_count, std::size_t doc_freq);

/// Raw term frequencies; out-of-vocabulary tokens are dropped.
SparseTermVector count_vector(const TokenList& doc, const CorpusStats& stats);
SparseTermVector tfidf_vector(const TokenList& doc, const CorpusStats& stats, const TfidfParams& params = {});
SparseTermVector bm25_vector(const TokenList& doc, const CorpusStats& stats, const Bm25Params& params = {});

}  // namespace reqfuse
