// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numeric>

#include "baselines/baselines.hpp"
#include "common/error.hpp"

namespace bgcnn::baselines {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// w = scale * v, so the L2 shrink of every weight is one multiply.
struct ScaledWeights {
  std::vector<double> v;
  double scale = 1.0;

  explicit ScaledWeights(std::size_t n) : v(n, 0.0) {}

  double dot(const SparseVector& x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < x.nnz(); ++j) s += v[static_cast<std::size_t>(x.indices[j])] * x.values[j];
    return s * scale;
  }

  void shrink(double factor) {
    if (factor <= 0.0) {
      std::fill(v.begin(), v.end(), 0.0);
      scale = 1.0;
      return;
    }
    scale *= factor;
    if (scale < 1e-9) materialize();
  }

  void axpy(double a, const SparseVector& x) {
    const double step = a / scale;
    for (std::size_t j = 0; j < x.nnz(); ++j) v[static_cast<std::size_t>(x.indices[j])] += step * x.values[j];
  }

  void materialize() {
    for (double& w : v) w *= scale;
    scale = 1.0;
  }
};

}  // namespace

double LinearModel::decision(const SparseVector& x) const {
  double s = bias;
  for (std::size_t j = 0; j < x.nnz(); ++j) {
    const auto t = static_cast<std::size_t>(x.indices[j]);
    if (x.indices[j] >= 0 && t < weights.size()) s += weights[t] * x.values[j];
  }
  return s;
}

double LinearModel::score(const SparseVector& x) const {
  const double d = decision(x);
  if (kind == LinearKind::Logistic) return sigmoid(d);
  return d >= 0.0 ? 1.0 : 0.0;
}

LinearModel linear_fit(std::span<const SparseVector> docs, std::span<const int> labels, std::size_t n_features,
                       const LinearOptions& options, Rng& rng) {
  require(docs.size() == labels.size(), "linear_fit: docs and labels differ in length");
  if (options.epochs < 1) throw ConfigError("linear_fit: epochs must be >= 1");
  if (!(options.learning_rate >= 0.0) || !(options.l2 >= 0.0))
    throw ConfigError("linear_fit: learning rate and l2 must be nonnegative");
  for (std::size_t i = 0; i < docs.size(); ++i) {
    require(labels[i] == 0 || labels[i] == 1, "linear_fit: labels must be 0 or 1");
    for (auto idx : docs[i].indices)
      require(idx >= 0 && static_cast<std::size_t>(idx) < n_features, "linear_fit: feature index out of range");
  }

  ScaledWeights w(n_features);
  double bias = 0.0;
  const double lr = options.learning_rate;
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      const SparseVector& x = docs[i];
      const double z = w.dot(x) + bias;
      // dLoss/dz
      double g = 0.0;
      if (options.kind == LinearKind::Logistic) {
        g = sigmoid(z) - static_cast<double>(labels[i]);
      } else {
        const double y = labels[i] == 1 ? 1.0 : -1.0;
        if (y * z < 1.0) g = -y;
      }
      w.shrink(1.0 - lr * options.l2);
      if (g != 0.0) {
        w.axpy(-lr * g, x);
        bias -= lr * g;
      }
    }
  }
  w.materialize();

  LinearModel model;
  model.weights = std::move(w.v);
  model.bias = bias;
  model.kind = options.kind;
  for (double v : model.weights)
    if (!std::isfinite(v)) throw NumericError("linear_fit: weights diverged");
  if (!std::isfinite(model.bias)) throw NumericError("linear_fit: bias diverged");
  return model;
}

}  // namespace bgcnn::baselines
