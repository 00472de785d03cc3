#include <cmath>
#include <numeric>

#include "models.hpp"

namespace reqfuse::detail {
namespace {

struct Layer {
  Eigen::MatrixXd w;  // in x out
  Eigen::RowVectorXd b;
};

class MlpModel final : public Model {
 public:
  MlpModel(Standardizer s, std::vector<Layer> layers) : standardizer_(std::move(s)), layers_(std::move(layers)) {}

  Eigen::MatrixXd scores(const FeatureMatrix& x) const override {
    Eigen::MatrixXd a = standardizer_.apply(x);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Eigen::MatrixXd h = a * layers_[l].w;
      h.rowwise() += layers_[l].b;
      a = (l + 1 < layers_.size()) ? Eigen::MatrixXd(h.cwiseMax(0.0)) : h;
    }
    return softmax_rows(a);
  }

  bool probabilistic() const override { return true; }

 private:
  Standardizer standardizer_;
  std::vector<Layer> layers_;
};

}  // namespace

// ReLU hidden layers with a softmax output, trained by mini-batch gradient
// descent with momentum on the (optionally class-weighted) cross-entropy.
std::unique_ptr<Model> train_mlp(const ClassifierSpec& spec, const FeatureMatrix& x, const Labels& y, int n_classes) {
  const int hidden_layers = static_cast<int>(spec.get("layers", 1));
  const auto units = static_cast<Eigen::Index>(spec.get("units", 64));
  const int epochs = static_cast<int>(spec.get("epochs", 200));
  const auto batch_size = static_cast<std::size_t>(spec.get("batch_size", 32));
  const double lr = spec.get("lr", 0.01);
  const double momentum = spec.get("momentum", 0.9);
  const double l2 = spec.get("l2", 1e-4);
  const auto weights = sample_weights(y, n_classes, spec.get("class_weight", 0) != 0);

  const Standardizer standardizer = Standardizer::fit(x);
  const Eigen::MatrixXd z = standardizer.apply(x);
  Rng rng(spec.seed);

  std::vector<Eigen::Index> sizes{z.cols()};
  for (int l = 0; l < hidden_layers; ++l) sizes.push_back(units);
  sizes.push_back(n_classes);

  std::vector<Layer> layers;
  std::vector<Layer> velocity;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    Layer layer{Eigen::MatrixXd(sizes[l], sizes[l + 1]), Eigen::RowVectorXd::Zero(sizes[l + 1])};
    const double sd = std::sqrt(2.0 / static_cast<double>(sizes[l]));
    for (Eigen::Index i = 0; i < layer.w.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.w.cols(); ++j) layer.w(i, j) = rng.normal(0.0, sd);
    velocity.push_back({Eigen::MatrixXd::Zero(sizes[l], sizes[l + 1]), Eigen::RowVectorXd::Zero(sizes[l + 1])});
    layers.push_back(std::move(layer));
  }

  const auto n = static_cast<std::size_t>(z.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Eigen::MatrixXd> activations(layers.size() + 1);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t end = std::min(n, start + batch_size);
      const auto m = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd batch(m, z.cols());
      Eigen::MatrixXd target = Eigen::MatrixXd::Zero(m, n_classes);
      Eigen::VectorXd bw(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        const auto row = order[start + static_cast<std::size_t>(i)];
        batch.row(i) = z.row(static_cast<Eigen::Index>(row));
        target(i, y[row]) = 1.0;
        bw(i) = weights[row];
      }

      activations[0] = batch;
      for (std::size_t l = 0; l < layers.size(); ++l) {
        Eigen::MatrixXd h = activations[l] * layers[l].w;
        h.rowwise() += layers[l].b;
        activations[l + 1] = (l + 1 < layers.size()) ? Eigen::MatrixXd(h.cwiseMax(0.0)) : softmax_rows(h);
      }

      Eigen::MatrixXd delta = bw.asDiagonal() * (activations.back() - target) / bw.sum();
      for (std::size_t l = layers.size(); l-- > 0;) {
        const Eigen::MatrixXd grad_w = activations[l].transpose() * delta + l2 * layers[l].w;
        const Eigen::RowVectorXd grad_b = delta.colwise().sum();
        if (l > 0) {
          delta = (delta * layers[l].w.transpose()).cwiseProduct(
              (activations[l].array() > 0.0).cast<double>().matrix());
        }
        velocity[l].w = momentum * velocity[l].w - lr * grad_w;
        velocity[l].b = momentum * velocity[l].b - lr * grad_b;
        layers[l].w += velocity[l].w;
        layers[l].b += velocity[l].b;
      }
    }
  }
  return std::make_unique<MlpModel>(standardizer, std::move(layers));
}

}  // namespace reqfuse::detail
