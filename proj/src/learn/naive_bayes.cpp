#include <cmath>
#include <numbers>

#include "models.hpp"

namespace reqfuse::detail {
namespace {

Eigen::VectorXd log_priors(const Labels& y, int n_classes) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_classes);
  for (int c : y) counts(c) += 1.0;
  return (counts / static_cast<double>(y.size())).array().log();
}

class GaussianNb final : public Model {
 public:
  GaussianNb(Eigen::MatrixXd mean, Eigen::MatrixXd var, Eigen::VectorXd log_prior)
      : mean_(std::move(mean)), var_(std::move(var)), log_prior_(std::move(log_prior)) {}

  Eigen::MatrixXd scores(const FeatureMatrix& x) const override {
    const auto c = mean_.rows();
    Eigen::MatrixXd logp(x.rows(), c);
    for (Eigen::Index k = 0; k < c; ++k) {
      const double norm = -0.5 * (2.0 * std::numbers::pi * var_.row(k).array()).log().sum();
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double quad = ((x.row(r) - mean_.row(k)).array().square() / var_.row(k).array()).sum();
        logp(r, k) = log_prior_(k) + norm - 0.5 * quad;
      }
    }
    return softmax_rows(logp);
  }

  bool probabilistic() const override { return true; }

 private:
  Eigen::MatrixXd mean_, var_;
  Eigen::VectorXd log_prior_;
};

class BernoulliNb final : public Model {
 public:
  BernoulliNb(Eigen::RowVectorXd lo, Eigen::RowVectorXd range, double threshold, Eigen::MatrixXd log_p,
              Eigen::MatrixXd log_q, Eigen::VectorXd log_prior)
      : lo_(std::move(lo)), range_(std::move(range)), threshold_(threshold), log_p_(std::move(log_p)),
        log_q_(std::move(log_q)), log_prior_(std::move(log_prior)) {}

  Eigen::MatrixXd binarize(const FeatureMatrix& x) const {
    Eigen::MatrixXd b(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double scaled = range_(j) > 0.0 ? (x(r, j) - lo_(j)) / range_(j) : 0.0;
        b(r, j) = scaled > threshold_ ? 1.0 : 0.0;
      }
    return b;
  }

  Eigen::MatrixXd scores(const FeatureMatrix& x) const override {
    const Eigen::MatrixXd b = binarize(x);
    Eigen::MatrixXd logp = b * log_p_.transpose() + (1.0 - b.array()).matrix() * log_q_.transpose();
    logp.rowwise() += log_prior_.transpose();
    return softmax_rows(logp);
  }

  bool probabilistic() const override { return true; }

 private:
  Eigen::RowVectorXd lo_, range_;
  double threshold_;
  Eigen::MatrixXd log_p_, log_q_;
  Eigen::VectorXd log_prior_;
};

}  // namespace

std::unique_ptr<Model> train_gnb(const ClassifierSpec& spec, const FeatureMatrix& x, const Labels& y, int n_classes) {
  const double floor = spec.get("var_floor", 1e-9);
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n_classes, x.cols());
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(n_classes, x.cols());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(n_classes);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    mean.row(y[static_cast<std::size_t>(r)]) += x.row(r);
    count(y[static_cast<std::size_t>(r)]) += 1.0;
  }
  for (int k = 0; k < n_classes; ++k) mean.row(k) /= count(k);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const int k = y[static_cast<std::size_t>(r)];
    var.row(k).array() += (x.row(r) - mean.row(k)).array().square();
  }
  for (int k = 0; k < n_classes; ++k) {
    var.row(k) /= count(k);
    var.row(k) = var.row(k).cwiseMax(floor);
  }
  return std::make_unique<GaussianNb>(std::move(mean), std::move(var), log_priors(y, n_classes));
}

std::unique_ptr<Model> train_bnb(const ClassifierSpec& spec, const FeatureMatrix& x, const Labels& y, int n_classes) {
  const double alpha = spec.get("alpha", 1.0);
  const double threshold = spec.get("threshold", 0.5);
  const Eigen::RowVectorXd lo = x.colwise().minCoeff();
  const Eigen::RowVectorXd range = x.colwise().maxCoeff() - lo;

  BernoulliNb scaler(lo, range, threshold, {}, {}, {});
  const Eigen::MatrixXd b = scaler.binarize(x);
  Eigen::MatrixXd ones = Eigen::MatrixXd::Zero(n_classes, x.cols());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(n_classes);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    ones.row(y[static_cast<std::size_t>(r)]) += b.row(r);
    count(y[static_cast<std::size_t>(r)]) += 1.0;
  }
  Eigen::MatrixXd p(n_classes, x.cols());
  for (int k = 0; k < n_classes; ++k) p.row(k) = (ones.row(k).array() + alpha) / (count(k) + 2.0 * alpha);
  Eigen::MatrixXd log_p = p.array().log();
  Eigen::MatrixXd log_q = (1.0 - p.array()).log();
  return std::make_unique<BernoulliNb>(lo, range, threshold, std::move(log_p), std::move(log_q),
                                       log_priors(y, n_classes));
}

}  // namespace reqfuse::detail
