#include "reqfuse/pca.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "reqfuse/error.hpp"

namespace reqfuse {

bool is_valid_pca_dim(std::size_t dim) noexcept {
  return std::find(kPcaTargetDims.begin(), kPcaTargetDims.end(), dim) != kPcaTargetDims.end();
}

PcaModel fit_pca(const std::vector<std::vector<double>>& samples, std::size_t target_dim, Provenance provenance) {
  if (!is_valid_pca_dim(target_dim)) {
    throw Error(ErrorCode::BadTargetDim, "target dim " + std::to_string(target_dim) + " is not one of 8/16/32/64/128");
  }
  if (samples.size() < target_dim + 1) {
    throw Error(ErrorCode::TooFewSamples, std::to_string(samples.size()) + " samples for target dim " +
                                              std::to_string(target_dim));
  }
  const std::size_t native = samples.front().size();
  for (const auto& s : samples)
    if (s.size() != native) throw Error(ErrorCode::DimMismatch, "embeddings have different lengths");
  if (native < target_dim) {
    throw Error(ErrorCode::BadTargetDim, "target dim " + std::to_string(target_dim) + " exceeds native dim " +
                                             std::to_string(native));
  }

  const auto n = static_cast<Eigen::Index>(samples.size());
  const auto d = static_cast<Eigen::Index>(native);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = samples[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

  PcaModel model;
  model.mean_ = x.colwise().mean().transpose();
  x.rowwise() -= model.mean_.transpose();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "covariance eigendecomposition failed");

  // Eigen returns ascending eigenvalues; keep the top target_dim in descending order.
  const auto t = static_cast<Eigen::Index>(target_dim);
  model.components_.resize(t, d);
  model.explained_variance_.resize(t);
  for (Eigen::Index c = 0; c < t; ++c) {
    const Eigen::Index src = d - 1 - c;
    Eigen::VectorXd v = eig.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    model.components_.row(c) = v.transpose();
    model.explained_variance_(c) = std::max(eig.eigenvalues()(src), 0.0);
  }
  model.provenance_ = std::move(provenance);
  return model;
}

PcaModel fit_pca(const std::vector<PairEmbedding>& train_embeddings, std::size_t target_dim) {
  std::vector<std::vector<double>> samples;
  std::vector<std::string> ids;
  samples.reserve(train_embeddings.size());
  ids.reserve(train_embeddings.size());
  for (const auto& e : train_embeddings) {
    if (e.model != train_embeddings.front().model) {
      throw Error(ErrorCode::InvalidArgument, "PCA fit mixes embeddings from different models");
    }
    samples.push_back(e.vector);
    ids.push_back(e.pair_id);
  }
  return fit_pca(samples, target_dim, Provenance(std::move(ids)));
}

std::vector<double> PcaModel::reduce(std::span<const double> embedding) const {
  if (embedding.size() != native_dim()) {
    throw Error(ErrorCode::DimMismatch, "embedding dim " + std::to_string(embedding.size()) + " vs PCA native dim " +
                                            std::to_string(native_dim()));
  }
  const Eigen::Map<const Eigen::VectorXd> e(embedding.data(), static_cast<Eigen::Index>(embedding.size()));
  const Eigen::VectorXd z = components_ * (e - mean_);
  return {z.data(), z.data() + z.size()};
}

std::vector<double> PcaModel::reconstruct(std::span<const double> reduced) const {
  if (reduced.size() != target_dim()) throw Error(ErrorCode::DimMismatch, "reduced dim differs from target dim");
  const Eigen::Map<const Eigen::VectorXd> z(reduced.data(), static_cast<Eigen::Index>(reduced.size()));
  const Eigen::VectorXd x = components_.transpose() * z + mean_;
  return {x.data(), x.data() + x.size()};
}

}  // namespace reqfuse
