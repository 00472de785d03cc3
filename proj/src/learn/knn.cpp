#include <algorithm>
#include <numeric>

#include "models.hpp"

namespace reqfuse::detail {
namespace {

class KnnModel final : public Model {
 public:
  KnnModel(FeatureMatrix x, Labels y, int n_classes, int k)
      : x_(std::move(x)), y_(std::move(y)), n_classes_(n_classes), k_(k) {}

  // Vote fractions over the k nearest training rows. Equal distances are
  // ordered by lower label index, then by training position.
  Eigen::MatrixXd scores(const FeatureMatrix& q) const override {
    const auto n = static_cast<std::size_t>(x_.rows());
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(k_), n);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(q.rows(), n_classes_);
    std::vector<std::size_t> order(n);
    std::vector<double> dist(n);
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
      for (std::size_t i = 0; i < n; ++i) dist[i] = (x_.row(static_cast<Eigen::Index>(i)) - q.row(r)).squaredNorm();
      std::iota(order.begin(), order.end(), 0);
      auto closer = [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        if (y_[a] != y_[b]) return y_[a] < y_[b];
        return a < b;
      };
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
      for (std::size_t i = 0; i < k; ++i) out(r, y_[order[i]]) += 1.0 / static_cast<double>(k);
    }
    return out;
  }

  bool probabilistic() const override { return true; }

 private:
  FeatureMatrix x_;
  Labels y_;
  int n_classes_;
  int k_;
};

}  // namespace

std::unique_ptr<Model> train_knn(const ClassifierSpec& spec, const FeatureMatrix& x, const Labels& y, int n_classes) {
  return std::make_unique<KnnModel>(x, y, n_classes, static_cast<int>(spec.get("k", 5)));
}

}  // namespace reqfuse::detail
