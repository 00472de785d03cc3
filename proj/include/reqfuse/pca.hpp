#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "reqfuse/llm_store.hpp"
#include "reqfuse/provenance.hpp"

namespace reqfuse {

/// Reduced CLS dimensions a hybrid pipeline may request.
inline constexpr std::array<std::size_t, 5> kPcaTargetDims = {8, 16, 32, 64, 128};

bool is_valid_pca_dim(std::size_t dim) noexcept;

class PcaModel {
 public:
  std::size_t target_dim() const noexcept { return static_cast<std::size_t>(components_.rows()); }
  std::size_t native_dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  /// target_dim x native_dim, orthonormal rows.
  const Eigen::MatrixXd& components() const noexcept { return components_; }
  /// Sample-covariance eigenvalues for the kept components, descending.
  const Eigen::VectorXd& explained_variance() const noexcept { return explained_variance_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  /// Projects (embedding - mean) onto the components.
  std::vector<double> reduce(std::span<const double> embedding) const;
  std::vector<double> reconstruct(std::span<const double> reduced) const;

  friend PcaModel fit_pca(const std::vector<std::vector<double>>&, std::size_t, Provenance);

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd components_;
  Eigen::VectorXd explained_variance_;
  Provenance provenance_;
};

/// Mean-centred PCA over the sample covariance (n - 1 denominator). Each
/// component is sign-normalized so its largest-magnitude loading is positive.
PcaModel fit_pca(const std::vector<std::vector<double>>& samples, std::size_t target_dim,
                 Provenance provenance = {});

struct PairEmbedding {
  std::string pair_id;
  LlmModel model = LlmModel::ALBERT;
  std::vector<double> vector;
};

/// All embeddings must come from one model; provenance is their pair ids.
PcaModel fit_pca(const std::vector<PairEmbedding>& train_embeddings, std::size_t target_dim);

}  // namespace reqfuse
