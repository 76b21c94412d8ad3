// SPDX-License-Identifier: Apache-2.0
#include "eval/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "common/error.hpp"

namespace bgcnn::eval {

namespace {

// Metrics stay exact fractions of counts until one final division. That
// division is correctly rounded, so algebraically equal metrics (weighted
// recall and accuracy, F1 and P when P == R) are bitwise equal.
struct Fraction {
  unsigned __int128 num = 0;
  unsigned __int128 den = 0;  // 0 encodes the defined-as-zero limit

  double value() const {
    if (den == 0 || num == 0) return 0.0;
    unsigned __int128 a = num, b = den;
    while (b != 0) {
      const unsigned __int128 t = a % b;
      a = b;
      b = t;
    }
    return static_cast<double>(num / a) / static_cast<double>(den / a);
  }
};

Fraction frac(std::size_t num, std::size_t den) { return {num, den}; }

struct ClassView {
  std::size_t tp, fp, fn;
  Fraction precision() const { return frac(tp, tp + fp); }
  Fraction recall() const { return frac(tp, tp + fn); }
  // 2PR / (P + R) in closed form.
  Fraction f1() const { return frac(2 * tp, 2 * tp + fp + fn); }
};

// sum_c support_c * value_c / total, exactly.
Fraction support_weighted(const Fraction& v0, std::size_t s0, const Fraction& v1, std::size_t s1,
                          std::size_t total) {
  const unsigned __int128 d0 = v0.den == 0 ? 1 : v0.den;
  const unsigned __int128 d1 = v1.den == 0 ? 1 : v1.den;
  const unsigned __int128 n0 = v0.den == 0 ? 0 : v0.num;
  const unsigned __int128 n1 = v1.den == 0 ? 0 : v1.num;
  Fraction out;
  out.num = static_cast<unsigned __int128>(s0) * n0 * d1 + static_cast<unsigned __int128>(s1) * n1 * d0;
  out.den = d0 * d1 * total;
  return out;
}

}  // namespace

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> truth) {
  require(predictions.size() == truth.size(), "confusion: " + std::to_string(predictions.size()) +
                                                  " predictions vs " + std::to_string(truth.size()) + " labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predictions[i], y = truth[i];
    require((p == 0 || p == 1) && (y == 0 || y == 1), "confusion: labels must be 0 or 1");
    if (p == 1 && y == 1)
      ++cm.tp;
    else if (p == 0 && y == 0)
      ++cm.tn;
    else if (p == 1)
      ++cm.fp;
    else
      ++cm.fn;
  }
  return cm;
}

EvalReport metrics(const ConfusionMatrix& cm) {
  require(cm.total() > 0, "metrics: empty confusion matrix");
  EvalReport r;
  r.confusion = cm;
  const std::size_t n = cm.total();
  const ClassView offensive{cm.tp, cm.fp, cm.fn};
  const ClassView benign{cm.tn, cm.fn, cm.fp};  // class 0 taken as positive
  r.accuracy = frac(cm.tp + cm.tn, n).value();
  r.precision = offensive.precision().value();
  r.recall = offensive.recall().value();
  r.f1 = offensive.f1().value();

  const std::size_t support1 = cm.tp + cm.fn;
  const std::size_t support0 = cm.tn + cm.fp;
  r.weighted_precision = support_weighted(benign.precision(), support0, offensive.precision(), support1, n).value();
  r.weighted_recall = support_weighted(benign.recall(), support0, offensive.recall(), support1, n).value();
  r.weighted_f1 = support_weighted(benign.f1(), support0, offensive.f1(), support1, n).value();
  return r;
}

double roc_auc(std::span<const double> scores, std::span<const int> truth) {
  require(scores.size() == truth.size(), "roc_auc: length mismatch");
  std::size_t n_pos = 0;
  for (int y : truth) {
    require(y == 0 || y == 1, "roc_auc: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(y);
  }
  const std::size_t n_neg = truth.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw UndefinedMetricError("roc_auc: truth contains a single class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of 1-based average ranks of positives (Mann-Whitney U).
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (truth[order[k]] == 1) pos_rank_sum += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

EvalReport evaluate(std::span<const double> scores, std::span<const int> truth, double threshold) {
  std::vector<int> preds(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) preds[i] = scores[i] >= threshold ? 1 : 0;
  EvalReport r = metrics(confusion(preds, truth));
  const bool has_both = std::any_of(truth.begin(), truth.end(), [](int y) { return y == 1; }) &&
                        std::any_of(truth.begin(), truth.end(), [](int y) { return y == 0; });
  if (has_both) r.auc = roc_auc(scores, truth);
  return r;
}

}  // namespace bgcnn::eval
