#include "reqfuse/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "reqfuse/error.hpp"

namespace reqfuse {

std::string_view to_string(SimilarityMethod method) noexcept {
  switch (method) {
    case SimilarityMethod::VSM: return "VSM";
    case SimilarityMethod::LSI: return "LSI";
    case SimilarityMethod::JS: return "JS";
    case SimilarityMethod::NMF: return "NMF";
    case SimilarityMethod::LDA: return "LDA";
    case SimilarityMethod::NMF_LDA: return "NMF_LDA";
    case SimilarityMethod::JS_LDA: return "JS_LDA";
    case SimilarityMethod::VSM_NMF: return "VSM_NMF";
    case SimilarityMethod::JS_NMF: return "JS_NMF";
    case SimilarityMethod::VSM_JS: return "VSM_JS";
  }
  return "?";
}

std::string_view to_string(Representation rep) noexcept {
  return rep == Representation::TFIDF ? "TFIDF" : "BM25";
}

bool is_hybrid(SimilarityMethod method) noexcept {
  return static_cast<int>(method) >= static_cast<int>(SimilarityMethod::NMF_LDA);
}

std::pair<SimilarityMethod, SimilarityMethod> hybrid_components(SimilarityMethod hybrid) {
  using M = SimilarityMethod;
  switch (hybrid) {
    case M::NMF_LDA: return {M::NMF, M::LDA};
    case M::JS_LDA: return {M::JS, M::LDA};
    case M::VSM_NMF: return {M::VSM, M::NMF};
    case M::JS_NMF: return {M::JS, M::NMF};
    case M::VSM_JS: return {M::VSM, M::JS};
    default: throw Error(ErrorCode::WrongComponents, std::string(to_string(hybrid)) + " is not a hybrid method");
  }
}

namespace {

void check_dims(const SparseTermVector& u, const SparseTermVector& v) {
  if (u.dim != v.dim) {
    throw Error(ErrorCode::DimMismatch, "vector dims " + std::to_string(u.dim) + " vs " + std::to_string(v.dim));
  }
}

double sparse_dot(const SparseTermVector& u, const SparseTermVector& v) {
  double dot = 0.0;
  auto a = u.entries.begin();
  auto b = v.entries.begin();
  while (a != u.entries.end() && b != v.entries.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      dot += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return dot;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Contribution p * log2(p / m) with the 0 * log 0 = 0 convention.
double kl_term(double p, double m) { return p > 0.0 ? p * std::log2(p / m) : 0.0; }

}  // namespace

SimilarityScore vsm_similarity(const SparseTermVector& u, const SparseTermVector& v, Representation rep) {
  check_dims(u, v);
  SimilarityScore score{0.0, SimilarityMethod::VSM, rep};
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return score;
  score.value = clamp01(sparse_dot(u, v) / (nu * nv));
  return score;
}

double dense_cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "latent dims differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return clamp01(dot / (std::sqrt(na) * std::sqrt(nb)));
}

double jensen_shannon_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimMismatch, "distribution dims differ");
  double jsd = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (m <= 0.0) continue;
    jsd += 0.5 * kl_term(p[i], m) + 0.5 * kl_term(q[i], m);
  }
  return std::clamp(jsd, 0.0, 1.0);
}

SimilarityScore js_similarity(const SparseTermVector& u, const SparseTermVector& v, Representation rep) {
  check_dims(u, v);
  SimilarityScore score{0.0, SimilarityMethod::JS, rep};
  const double su = u.sum();
  const double sv = v.sum();
  if (su <= 0.0 || sv <= 0.0) return score;

  // Merge over the union of supports; absent entries are zero mass.
  double jsd = 0.0;
  auto a = u.entries.begin();
  auto b = v.entries.begin();
  while (a != u.entries.end() || b != v.entries.end()) {
    double p = 0.0, q = 0.0;
    if (b == v.entries.end() || (a != u.entries.end() && a->first < b->first)) {
      p = a->second / su;
      ++a;
    } else if (a == u.entries.end() || b->first < a->first) {
      q = b->second / sv;
      ++b;
    } else {
      p = a->second / su;
      q = b->second / sv;
      ++a;
      ++b;
    }
    const double m = 0.5 * (p + q);
    jsd += 0.5 * kl_term(p, m) + 0.5 * kl_term(q, m);
  }
  score.value = clamp01(1.0 - std::clamp(jsd, 0.0, 1.0));
  return score;
}

SimilarityScore hybrid_similarity(SimilarityMethod hybrid, const SimilarityScore& a, const SimilarityScore& b) {
  const auto [first, second] = hybrid_components(hybrid);
  const bool matches = (a.method == first && b.method == second) || (a.method == second && b.method == first);
  if (!matches) {
    throw Error(ErrorCode::WrongComponents, std::string(to_string(hybrid)) + " needs " +
                                                std::string(to_string(first)) + " and " +
                                                std::string(to_string(second)) + " scores");
  }
  if (a.representation != b.representation) {
    throw Error(ErrorCode::WrongComponents, "hybrid components come from different representations");
  }
  // Summation order fixed so the result does not depend on argument order.
  const double lo = std::min(a.value, b.value);
  const double hi = std::max(a.value, b.value);
  return {clamp01(0.5 * (lo + hi)), hybrid, a.representation};
}

}  // namespace reqfuse
