// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace bgcnn::eval {

struct ConfusionMatrix {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Binary metrics take offensive (label 1) as the positive class. Weighted
/// metrics average the one-vs-rest values of both classes by true support.
/// Zero denominators yield 0.
struct EvalReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::optional<double> auc;
};

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> truth);

EvalReport metrics(const ConfusionMatrix& cm);

/// P(score+ > score-) + 0.5 P(score+ == score-), via average ranks.
/// Throws UndefinedMetricError when `truth` holds a single class.
double roc_auc(std::span<const double> scores, std::span<const int> truth);

/// confusion + metrics + AUC (omitted when truth has a single class).
EvalReport evaluate(std::span<const double> scores, std::span<const int> truth, double threshold = 0.5);

}  // namespace bgcnn::eval
