// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <vector>

#include "tensor/rng.hpp"
#include "text/features.hpp"

namespace bgcnn::baselines {

using text::SparseVector;

// All classifiers work on feature indices in [0, n_features).

// ---------------------------------------------------------------------------
// Multinomial naive Bayes

struct NbModel {
  std::array<double, 2> class_log_prior{};
  std::array<std::vector<double>, 2> feature_log_prob;  // [class][feature]
  double alpha = 1.0;

  std::size_t n_features() const { return feature_log_prob[0].size(); }
};

struct NbPrediction {
  int label = 0;
  std::array<double, 2> log_posterior{};  // unnormalized joint log-likelihoods
};

/// log P(c) = ln(n_c / n); log P(t|c) = ln((count(t,c) + alpha) / (sum_t count(t,c) + alpha V)).
/// Throws ConfigError if a class has no documents.
NbModel nb_fit(std::span<const SparseVector> docs, std::span<const int> labels, std::size_t n_features,
               double alpha = 1.0);

/// argmax of log P(c) + sum_t count(t) log P(t|c); ties go to label 0.
NbPrediction nb_predict(const NbModel& model, const SparseVector& doc);

/// exp-normalized posteriors of a prediction.
std::array<double, 2> nb_posterior(const NbPrediction& prediction);

// ---------------------------------------------------------------------------
// Linear models trained by SGD

enum class LinearKind { Logistic, Hinge };

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  LinearKind kind = LinearKind::Logistic;

  double decision(const SparseVector& x) const;
  /// Logistic: sigmoid(decision). Hinge: 1 for decision >= 0, else 0.
  double score(const SparseVector& x) const;
  int predict(const SparseVector& x) const { return decision(x) >= 0.0 ? 1 : 0; }
};

struct LinearOptions {
  LinearKind kind = LinearKind::Logistic;
  double learning_rate = 0.5;
  double l2 = 1e-5;
  std::size_t epochs = 10;
};

/// Seeded-shuffle SGD from zero weights. Each step applies the loss
/// (sub)gradient plus l2 * w. Logistic uses BCE on sigmoid(w.x + b); hinge
/// uses max(0, 1 - y(w.x + b)) with y in {-1, +1}.
LinearModel linear_fit(std::span<const SparseVector> docs, std::span<const int> labels, std::size_t n_features,
                       const LinearOptions& options, Rng& rng);

// ---------------------------------------------------------------------------
// k nearest neighbours, cosine similarity

/// Inverted index over training vectors for repeated queries.
class KnnIndex {
 public:
  KnnIndex(std::vector<SparseVector> docs, std::vector<int> labels);

  /// Majority vote among the k most similar documents; similarity ties are
  /// broken by lower training index, vote ties go to label 0.
  int predict(const SparseVector& query, std::size_t k) const;
  /// Fraction of positive votes among the k neighbours.
  double score(const SparseVector& query, std::size_t k) const;

  std::size_t size() const { return docs_.size(); }

 private:
  std::vector<std::size_t> neighbours(const SparseVector& query, std::size_t k) const;

  std::vector<SparseVector> docs_;
  std::vector<int> labels_;
  std::vector<double> norms_;
  std::vector<std::vector<std::pair<std::size_t, double>>> postings_;
};

int knn_predict(std::span<const SparseVector> train_docs, std::span<const int> train_labels,
                const SparseVector& query, std::size_t k);

double cosine_similarity(const SparseVector& a, const SparseVector& b);

}  // namespace bgcnn::baselines
