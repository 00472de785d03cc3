#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reqfuse/provenance.hpp"
#include "reqfuse/similarity.hpp"
#include "reqfuse/textrep.hpp"

namespace reqfuse {

enum class LatentKind { LSI, NMF, LDA };

std::string_view to_string(LatentKind kind) noexcept;

struct LatentParams {
  std::size_t k = 20;
  std::uint64_t seed = 0;
  /// NMF: multiplicative update iterations. LDA: Gibbs sweeps. Unused by LSI.
  int max_iter = 200;
  /// NMF stops once the relative drop in Frobenius error falls below tol.
  double tol = 1e-4;
  /// LDA document-topic prior; non-positive means 50 / k.
  double alpha = 0.0;
  double beta = 0.01;
  int infer_sweeps = 50;
  /// LDA turns each weight into round(quantization * w / max_w) pseudo-tokens.
  int quantization = 10;
};

/// A fitted LSI, NMF or LDA factorization over a fixed vocabulary.
///
/// LSI keeps the top-k right singular vectors; documents are compared through
/// their coordinates V_k^T u. NMF keeps the non-negative topic-term matrix H and
/// projects by least squares against H^T. LDA keeps the smoothed topic-term
/// distributions phi and infers topic mixtures by fixed-phi Gibbs sampling.
class LatentModel {
 public:
  LatentKind kind() const noexcept { return kind_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t vocab_size() const noexcept { return vocab_; }
  std::uint64_t seed() const noexcept { return params_.seed; }
  const LatentParams& params() const noexcept { return params_; }
  double alpha() const noexcept { return alpha_; }

  /// LSI: vocab x k orthonormal basis. NMF: k x vocab components. LDA: k x vocab phi.
  const Eigen::MatrixXd& factors() const noexcept { return factors_; }
  /// LSI only: the k leading singular values, descending.
  const Eigen::VectorXd& singular_values() const noexcept { return singular_values_; }
  /// NMF only: Frobenius error before the first update and after each update.
  const std::vector<double>& objective_trace() const noexcept { return objective_trace_; }
  /// NMF only: the fitted document factor W (docs x k).
  const Eigen::MatrixXd& doc_factors() const noexcept { return doc_factors_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  /// Latent coordinates for LSI/NMF, the inferred topic mixture for LDA.
  std::vector<double> project(const SparseTermVector& u) const;
  /// Maps latent coordinates back to term space.
  std::vector<double> reconstruct(std::span<const double> coords) const;

  /// Serialized parameters; equal fits produce equal bytes.
  std::string to_bytes() const;

  friend LatentModel fit_latent(LatentKind, const std::vector<SparseTermVector>&, const LatentParams&, Provenance);

 private:
  std::vector<double> infer_topics(const SparseTermVector& u) const;

  LatentKind kind_ = LatentKind::LSI;
  std::size_t k_ = 0;
  std::size_t vocab_ = 0;
  LatentParams params_;
  double alpha_ = 0.0;
  Eigen::MatrixXd factors_;
  Eigen::MatrixXd projector_;  // k x vocab, LSI and NMF
  Eigen::VectorXd singular_values_;
  Eigen::MatrixXd doc_factors_;
  std::vector<double> objective_trace_;
  Provenance provenance_;
};

LatentModel fit_latent(LatentKind kind, const std::vector<SparseTermVector>& matrix, const LatentParams& params,
                       Provenance provenance = {});

/// LSI/NMF: clamped cosine of projections. LDA: 1 - base-2 JSD of topic mixtures.
SimilarityScore latent_similarity(const LatentModel& model, const SparseTermVector& u, const SparseTermVector& v,
                                  Representation rep = Representation::TFIDF);

/// Pseudo-token counts fed to the Gibbs sampler for one weighted document.
std::vector<std::pair<std::uint32_t, int>> quantize_weights(const SparseTermVector& u, int quantization);

}  // namespace reqfuse
