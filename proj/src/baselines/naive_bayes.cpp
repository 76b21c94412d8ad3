// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "baselines/baselines.hpp"
#include "common/error.hpp"

namespace bgcnn::baselines {

NbModel nb_fit(std::span<const SparseVector> docs, std::span<const int> labels, std::size_t n_features,
               double alpha) {
  require(docs.size() == labels.size(), "nb_fit: docs and labels differ in length");
  require(n_features >= 1, "nb_fit: n_features must be >= 1");
  if (!(alpha > 0.0)) throw ConfigError("nb_fit: alpha must be positive");

  std::array<std::size_t, 2> n_docs{};
  std::array<std::vector<double>, 2> counts{std::vector<double>(n_features, 0.0), std::vector<double>(n_features, 0.0)};
  for (std::size_t i = 0; i < docs.size(); ++i) {
    require(labels[i] == 0 || labels[i] == 1, "nb_fit: labels must be 0 or 1");
    const auto c = static_cast<std::size_t>(labels[i]);
    ++n_docs[c];
    const auto& d = docs[i];
    for (std::size_t j = 0; j < d.nnz(); ++j) {
      require(d.indices[j] >= 0 && static_cast<std::size_t>(d.indices[j]) < n_features,
              "nb_fit: feature index out of range");
      counts[c][static_cast<std::size_t>(d.indices[j])] += d.values[j];
    }
  }
  for (std::size_t c = 0; c < 2; ++c)
    if (n_docs[c] == 0) throw ConfigError("nb_fit: class " + std::to_string(c) + " has no training documents");

  NbModel model;
  model.alpha = alpha;
  const double n = static_cast<double>(docs.size());
  for (std::size_t c = 0; c < 2; ++c) {
    model.class_log_prior[c] = std::log(static_cast<double>(n_docs[c]) / n);
    double total = 0.0;
    for (double v : counts[c]) total += v;
    const double denom = total + alpha * static_cast<double>(n_features);
    model.feature_log_prob[c].resize(n_features);
    for (std::size_t t = 0; t < n_features; ++t) model.feature_log_prob[c][t] = std::log((counts[c][t] + alpha) / denom);
  }
  return model;
}

NbPrediction nb_predict(const NbModel& model, const SparseVector& doc) {
  NbPrediction p;
  for (std::size_t c = 0; c < 2; ++c) {
    double s = model.class_log_prior[c];
    for (std::size_t j = 0; j < doc.nnz(); ++j) {
      const auto t = static_cast<std::size_t>(doc.indices[j]);
      require(doc.indices[j] >= 0 && t < model.n_features(), "nb_predict: feature index out of range");
      s += doc.values[j] * model.feature_log_prob[c][t];
    }
    p.log_posterior[c] = s;
  }
  p.label = p.log_posterior[1] > p.log_posterior[0] ? 1 : 0;
  return p;
}

std::array<double, 2> nb_posterior(const NbPrediction& prediction) {
  const double m = std::max(prediction.log_posterior[0], prediction.log_posterior[1]);
  const double e0 = std::exp(prediction.log_posterior[0] - m);
  const double e1 = std::exp(prediction.log_posterior[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace bgcnn::baselines
