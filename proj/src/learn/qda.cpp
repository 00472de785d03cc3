#include <cmath>
#include <numbers>

#include "models.hpp"
#include "reqfuse/error.hpp"

namespace reqfuse::detail {
namespace {

struct ClassGaussian {
  Eigen::RowVectorXd mean;
  Eigen::LLT<Eigen::MatrixXd> chol;
  double log_det = 0.0;
  double log_prior = 0.0;
};

class QdaModel final : public Model {
 public:
  explicit QdaModel(std::vector<ClassGaussian> classes) : classes_(std::move(classes)) {}

  Eigen::MatrixXd scores(const FeatureMatrix& x) const override {
    Eigen::MatrixXd logp(x.rows(), static_cast<Eigen::Index>(classes_.size()));
    const double d = static_cast<double>(x.cols());
    for (std::size_t k = 0; k < classes_.size(); ++k) {
      const auto& g = classes_[k];
      const Eigen::MatrixXd centered = (x.rowwise() - g.mean).transpose();
      const Eigen::MatrixXd solved = g.chol.matrixL().solve(centered);
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double maha = solved.col(r).squaredNorm();
        logp(r, static_cast<Eigen::Index>(k)) =
            g.log_prior - 0.5 * (g.log_det + maha + d * std::log(2.0 * std::numbers::pi));
      }
    }
    return softmax_rows(logp);
  }

  bool probabilistic() const override { return true; }

 private:
  std::vector<ClassGaussian> classes_;
};

}  // namespace

std::unique_ptr<Model> train_qda(const ClassifierSpec& spec, const FeatureMatrix& x, const Labels& y, int n_classes) {
  const double ridge = spec.get("ridge", 1e-6);
  const auto d = x.cols();
  std::vector<ClassGaussian> classes(static_cast<std::size_t>(n_classes));
  for (int k = 0; k < n_classes; ++k) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == k) rows.push_back(static_cast<Eigen::Index>(i));
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd xs(n, d);
    for (Eigen::Index i = 0; i < n; ++i) xs.row(i) = x.row(rows[static_cast<std::size_t>(i)]);
    auto& g = classes[static_cast<std::size_t>(k)];
    g.mean = xs.colwise().mean();
    const Eigen::MatrixXd centered = xs.rowwise() - g.mean;
    Eigen::MatrixXd cov = n > 1 ? Eigen::MatrixXd(centered.transpose() * centered / static_cast<double>(n - 1))
                                : Eigen::MatrixXd::Zero(d, d);
    cov.diagonal().array() += ridge;
    g.chol.compute(cov);
    if (g.chol.info() != Eigen::Success) {
      throw Error(ErrorCode::InvalidArgument, "QDA covariance of class " + std::to_string(k) + " is not positive definite");
    }
    g.log_det = 2.0 * g.chol.matrixL().toDenseMatrix().diagonal().array().log().sum();
    g.log_prior = std::log(static_cast<double>(n) / static_cast<double>(y.size()));
  }
  return std::make_unique<QdaModel>(std::move(classes));
}

}  // namespace reqfuse::detail
