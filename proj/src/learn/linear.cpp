#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "models.hpp"

namespace reqfuse::detail {
namespace {

Eigen::MatrixXd one_hot(const Labels& y, int n_classes) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(y.size()), n_classes);
  for (std::size_t i = 0; i < y.size(); ++i) out(static_cast<Eigen::Index>(i), y[i]) = 1.0;
  return out;
}

class LinearModel final : public Model {
 public:
  LinearModel(Standardizer s, Eigen::MatrixXd w, Eigen::RowVectorXd b, bool softmax)
      : standardizer_(std::move(s)), w_(std::move(w)), b_(std::move(b)), softmax_(softmax) {}

  Eigen::MatrixXd scores(const FeatureMatrix& x) const override {
    Eigen::MatrixXd logits = standardizer_.apply(x) * w_;
    logits.rowwise() += b_;
    return softmax_ ? softmax_rows(logits) : logits;
  }

  bool probabilistic() const override { return softmax_; }

 private:
  Standardizer standardizer_;
  Eigen::MatrixXd w_;
  Eigen::RowVectorXd b_;
  bool softmax_;
};

}  // namespace

// Multinomial logistic regression with an L2 penalty, fitted by full-batch
// gradient descent. The step is lr / (L + l2), where L bounds the curvature of
// the softmax loss on the standardized design.
std::unique_ptr<Model> train_logr(const ClassifierSpec& spec, const FeatureMatrix& x, const Labels& y, int n_classes) {
  const double l2 = spec.get("l2", 1e-4);
  const double lr = spec.get("lr", 1.0);
  const int max_iter = static_cast<int>(spec.get("max_iter", 2000));
  const double tol = spec.get("tol", 1e-6);
  const auto weights = sample_weights(y, n_classes, spec.get("class_weight", 0) != 0);

  const Standardizer standardizer = Standardizer::fit(x);
  const Eigen::MatrixXd z = standardizer.apply(x);
  const auto n = z.rows();
  const auto d = z.cols();
  const Eigen::VectorXd sw = Eigen::Map<const Eigen::VectorXd>(weights.data(), n);
  const double sw_total = sw.sum();

  Eigen::MatrixXd augmented(n, d + 1);
  augmented << z, Eigen::VectorXd::Ones(n);
  const Eigen::MatrixXd gram = augmented.transpose() * sw.asDiagonal() * augmented / sw_total;
  const double curvature = 0.5 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
                                     .eigenvalues()
                                     .maxCoeff();
  const double step = lr / (curvature + l2);

  const Eigen::MatrixXd target = one_hot(y, n_classes);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, n_classes);
  Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(n_classes);
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::MatrixXd logits = z * w;
    logits.rowwise() += b;
    const Eigen::MatrixXd residual = sw.asDiagonal() * (softmax_rows(logits) - target);
    const Eigen::MatrixXd grad_w = z.transpose() * residual / sw_total + l2 * w;
    const Eigen::RowVectorXd grad_b = residual.colwise().sum() / sw_total;
    if (std::max(grad_w.cwiseAbs().maxCoeff(), grad_b.cwiseAbs().maxCoeff()) < tol) break;
    w -= step * grad_w;
    b -= step * grad_b;
  }
  return std::make_unique<LinearModel>(standardizer, std::move(w), std::move(b), true);
}

// One-vs-rest linear SVM: L2-regularized hinge loss minimized by full-batch
// sub-gradient descent with step lr / sqrt(t). The iterate with the lowest
// objective is kept.
std::unique_ptr<Model> train_linsvm(const ClassifierSpec& spec, const FeatureMatrix& x, const Labels& y,
                                    int n_classes) {
  const double l2 = spec.get("l2", 1e-3);
  const double lr = spec.get("lr", 0.5);
  const int max_iter = static_cast<int>(spec.get("max_iter", 1000));
  const auto weights = sample_weights(y, n_classes, spec.get("class_weight", 0) != 0);

  const Standardizer standardizer = Standardizer::fit(x);
  const Eigen::MatrixXd z = standardizer.apply(x);
  const auto n = z.rows();
  const auto d = z.cols();
  const Eigen::VectorXd sw = Eigen::Map<const Eigen::VectorXd>(weights.data(), n);
  const double sw_total = sw.sum();

  Eigen::MatrixXd w_all(d, n_classes);
  Eigen::RowVectorXd b_all(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    Eigen::VectorXd sign(n);
    for (Eigen::Index i = 0; i < n; ++i) sign(i) = y[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    double b = 0.0;
    Eigen::VectorXd best_w = w;
    double best_b = b;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int t = 1; t <= max_iter; ++t) {
      const Eigen::VectorXd margin = sign.array() * ((z * w).array() + b);
      Eigen::VectorXd active = Eigen::VectorXd::Zero(n);
      double hinge = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (margin(i) < 1.0) {
          active(i) = sw(i) * sign(i);
          hinge += sw(i) * (1.0 - margin(i));
        }
      }
      const double obj = 0.5 * l2 * w.squaredNorm() + hinge / sw_total;
      if (obj < best_obj) {
        best_obj = obj;
        best_w = w;
        best_b = b;
      }
      const Eigen::VectorXd grad_w = l2 * w - z.transpose() * active / sw_total;
      const double grad_b = -active.sum() / sw_total;
      const double eta = lr / std::sqrt(static_cast<double>(t));
      w -= eta * grad_w;
      b -= eta * grad_b;
    }
    w_all.col(c) = best_w;
    b_all(c) = best_b;
  }
  return std::make_unique<LinearModel>(standardizer, std::move(w_all), std::move(b_all), false);
}

}  // namespace reqfuse::detail
