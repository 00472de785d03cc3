#pragma once

#include <array>
#include <span>
#include <string_view>
#include <utility>

#include "reqfuse/textrep.hpp"

namespace reqfuse {

/// Canonical order of the ten similarity methods; the last five are hybrids.
enum class SimilarityMethod { VSM, LSI, JS, NMF, LDA, NMF_LDA, JS_LDA, VSM_NMF, JS_NMF, VSM_JS };
enum class Representation { TFIDF, BM25 };

inline constexpr std::size_t kMethodCount = 10;
inline constexpr std::array<SimilarityMethod, kMethodCount> kAllMethods = {
    SimilarityMethod::VSM,     SimilarityMethod::LSI,    SimilarityMethod::JS,     SimilarityMethod::NMF,
    SimilarityMethod::LDA,     SimilarityMethod::NMF_LDA, SimilarityMethod::JS_LDA, SimilarityMethod::VSM_NMF,
    SimilarityMethod::JS_NMF,  SimilarityMethod::VSM_JS};

std::string_view to_string(SimilarityMethod method) noexcept;
std::string_view to_string(Representation rep) noexcept;

bool is_hybrid(SimilarityMethod method) noexcept;
/// The two base methods a hybrid averages.
std::pair<SimilarityMethod, SimilarityMethod> hybrid_components(SimilarityMethod hybrid);

struct SimilarityScore {
  double value = 0.0;
  SimilarityMethod method = SimilarityMethod::VSM;
  Representation representation = Representation::TFIDF;
};

/// Cosine in [0, 1]; 0 when either side is the zero vector.
SimilarityScore vsm_similarity(const SparseTermVector& u, const SparseTermVector& v,
                               Representation rep = Representation::TFIDF);

/// Cosine between dense latent coordinates, clamped to [0, 1].
double dense_cosine(std::span<const double> a, std::span<const double> b);

/// Base-2 Jensen-Shannon divergence of two probability vectors, in [0, 1].
double jensen_shannon_divergence(std::span<const double> p, std::span<const double> q);

/// 1 - JSD after normalizing both vectors to distributions.
SimilarityScore js_similarity(const SparseTermVector& u, const SparseTermVector& v,
                              Representation rep = Representation::TFIDF);

/// Unweighted mean of the two component scores named by `hybrid`.
SimilarityScore hybrid_similarity(SimilarityMethod hybrid, const SimilarityScore& a, const SimilarityScore& b);

}  // namespace reqfuse
