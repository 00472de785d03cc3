#include <algorithm>
#include <cmath>
#include <map>

#include "reqfuse/error.hpp"
#include "reqfuse/textrep.hpp"

namespace reqfuse {

std::optional<std::uint32_t> CorpusStats::index_of(std::string_view term) const {
  auto it = vocabulary_.find(std::string(term));
  if (it == vocabulary_.end()) return std::nullopt;
  return it->second;
}

std::size_t CorpusStats::doc_freq(std::string_view term) const {
  auto idx = index_of(term);
  return idx ? doc_freq_[*idx] : 0;
}

CorpusStats fit_corpus_stats(const std::vector<TokenList>& docs, Provenance provenance) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot fit statistics on zero documents");
  CorpusStats stats;
  stats.doc_count_ = docs.size();
  stats.provenance_ = std::move(provenance);
  std::size_t total_tokens = 0;
  std::vector<std::uint32_t> last_seen_in;  // per term, 1 + index of last doc that counted it
  for (std::size_t d = 0; d < docs.size(); ++d) {
    total_tokens += docs[d].size();
    for (const auto& token : docs[d]) {
      auto [it, inserted] = stats.vocabulary_.try_emplace(token, static_cast<std::uint32_t>(stats.terms_.size()));
      if (inserted) {
        stats.terms_.push_back(token);
        stats.doc_freq_.push_back(0);
        last_seen_in.push_back(0);
      }
      const auto idx = it->second;
      if (last_seen_in[idx] != d + 1) {
        last_seen_in[idx] = static_cast<std::uint32_t>(d + 1);
        ++stats.doc_freq_[idx];
      }
    }
  }
  stats.avg_doc_len_ = static_cast<double>(total_tokens) / static_cast<double>(docs.size());
  return stats;
}

double SparseTermVector::norm() const {
  double s = 0.0;
  for (const auto& [i, w] : entries) s += w * w;
  return std::sqrt(s);
}

double SparseTermVector::sum() const {
  double s = 0.0;
  for (const auto& [i, w] : entries) s += w;
  return s;
}

double SparseTermVector::at(std::uint32_t index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), index,
                             [](const auto& e, std::uint32_t i) { return e.first < i; });
  return (it != entries.end() && it->first == index) ? it->second : 0.0;
}

std::vector<double> SparseTermVector::to_dense() const {
  std::vector<double> dense(dim, 0.0);
  for (const auto& [i, w] : entries) dense[i] = w;
  return dense;
}

double tfidf_idf(std::size_t doc_count, std::size_t doc_freq, bool smooth) {
  const auto n = static_cast<double>(doc_count);
  const auto df = static_cast<double>(doc_freq);
  return smooth ? std::log((1.0 + n) / (1.0 + df)) + 1.0 : std::log(n / df) + 1.0;
}

double bm25_idf(std::size_t doc_count, std::size_t doc_freq) {
  const auto n = static_cast<double>(doc_count);
  const auto df = static_cast<double>(doc_freq);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

namespace {

std::map<std::uint32_t, std::size_t> term_counts(const TokenList& doc, const CorpusStats& stats) {
  std::map<std::uint32_t, std::size_t> counts;
  for (const auto& token : doc)
    if (auto idx = stats.index_of(token)) ++counts[*idx];
  return counts;
}

}  // namespace

SparseTermVector count_vector(const TokenList& doc, const CorpusStats& stats) {
  SparseTermVector v{stats.vocab_size(), {}};
  for (const auto& [idx, tf] : term_counts(doc, stats)) v.entries.emplace_back(idx, static_cast<double>(tf));
  return v;
}

SparseTermVector tfidf_vector(const TokenList& doc, const CorpusStats& stats, const TfidfParams& params) {
  SparseTermVector v{stats.vocab_size(), {}};
  for (const auto& [idx, count] : term_counts(doc, stats)) {
    const auto tf = static_cast<double>(count);
    const double weight = (params.sublinear_tf ? 1.0 + std::log(tf) : tf) *
                          tfidf_idf(stats.doc_count(), stats.doc_freq(idx), params.smooth_idf);
    if (weight > 0.0) v.entries.emplace_back(idx, weight);
  }
  if (params.l2_normalize) {
    const double n = v.norm();
    if (n > 0.0)
      for (auto& e : v.entries) e.second /= n;
  }
  return v;
}

SparseTermVector bm25_vector(const TokenList& doc, const CorpusStats& stats, const Bm25Params& params) {
  if (!(params.k1 > 0.0) || params.b < 0.0 || params.b > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "BM25 requires k1 > 0 and 0 <= b <= 1");
  }
  SparseTermVector v{stats.vocab_size(), {}};
  if (doc.empty()) return v;
  if (stats.avg_doc_len() <= 0.0) {
    throw Error(ErrorCode::DegenerateStats, "average document length is zero");
  }
  const double length_norm = 1.0 - params.b + params.b * static_cast<double>(doc.size()) / stats.avg_doc_len();
  for (const auto& [idx, count] : term_counts(doc, stats)) {
    const auto tf = static_cast<double>(count);
    const double weight =
        bm25_idf(stats.doc_count(), stats.doc_freq(idx)) * tf * (params.k1 + 1.0) / (tf + params.k1 * length_norm);
    if (weight > 0.0) v.entries.emplace_back(idx, weight);
  }
  return v;
}

}  // namespace reqfuse
