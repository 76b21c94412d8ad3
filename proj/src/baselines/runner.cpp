// SPDX-License-Identifier: Apache-2.0
#include "baselines/runner.hpp"

#include <algorithm>
#include <array>

#include "baselines/baselines.hpp"
#include "common/error.hpp"
#include "text/features.hpp"
#include "text/vocab.hpp"

namespace bgcnn::baselines {

namespace {

struct AlgoInfo {
  Algorithm algorithm;
  std::string_view name;
  std::string_view title;
};

constexpr std::array<AlgoInfo, 5> kAlgorithms{{
    {Algorithm::NaiveBayes, "nb", "MultinomialNB"},
    {Algorithm::Logistic, "logreg", "Logistic Regression"},
    {Algorithm::LinearSvm, "svm", "Linear SVM"},
    {Algorithm::Knn, "knn", "KNN"},
    {Algorithm::Majority, "majority", "Majority class"},
}};

// Vocabulary ids 0 and 1 are reserved, so feature index = id - 2.
SparseVector shift_features(SparseVector v) {
  for (auto& idx : v.indices) idx -= 2;
  return v;
}

std::vector<SparseVector> vectorize(const std::vector<data::RawTweet>& records, const text::Vocabulary& vocab,
                                    const text::StopwordSet& stopwords) {
  std::vector<SparseVector> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(text::count_vectorize(text::preprocess(r.text, stopwords), vocab));
  return out;
}

std::vector<int> labels_of(const std::vector<data::RawTweet>& records) {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

}  // namespace

FeatureKind resolve_features(Algorithm algorithm, FeatureKind requested) {
  if (requested != FeatureKind::Default) return requested;
  return algorithm == Algorithm::NaiveBayes ? FeatureKind::Counts : FeatureKind::Tfidf;
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (const auto& a : kAlgorithms)
    if (a.name == name) return a.algorithm;
  if (name == "lr") return Algorithm::Logistic;
  return std::nullopt;
}

std::string_view algorithm_name(Algorithm algorithm) {
  for (const auto& a : kAlgorithms)
    if (a.algorithm == algorithm) return a.name;
  return "?";
}

std::string_view algorithm_title(Algorithm algorithm) {
  for (const auto& a : kAlgorithms)
    if (a.algorithm == algorithm) return a.title;
  return "?";
}

std::string supported_algorithms() {
  std::string out;
  for (const auto& a : kAlgorithms) {
    if (!out.empty()) out += ", ";
    out += a.name;
  }
  return out;
}

std::optional<FeatureKind> parse_features(std::string_view name) {
  if (name == "count" || name == "counts") return FeatureKind::Counts;
  if (name == "tfidf") return FeatureKind::Tfidf;
  if (name == "default") return FeatureKind::Default;
  return std::nullopt;
}

eval::EvalReport run_baseline(const BaselineOptions& options, const std::vector<data::RawTweet>& train,
                              const std::vector<data::RawTweet>& test, const text::StopwordSet& stopwords) {
  if (train.empty()) throw ConfigError("baseline: training set is empty");
  if (test.empty()) throw ConfigError("baseline: evaluation set is empty");
  const std::vector<int> y_train = labels_of(train);
  const std::vector<int> y_test = labels_of(test);

  std::vector<double> scores(test.size(), 0.0);
  std::vector<int> preds(test.size(), 0);

  if (options.algorithm == Algorithm::Majority) {
    const int majority = data::class_report(train).majority_label;
    for (std::size_t i = 0; i < test.size(); ++i) {
      preds[i] = majority;
      scores[i] = static_cast<double>(majority);
    }
  } else {
    std::vector<text::Tokens> train_tokens;
    train_tokens.reserve(train.size());
    for (const auto& r : train) train_tokens.push_back(text::preprocess(r.text, stopwords));
    const text::Vocabulary vocab = text::build_vocabulary(train_tokens, options.min_freq, options.max_vocab);
    if (vocab.size() <= 2) throw ConfigError("baseline: vocabulary is empty after preprocessing");
    const std::size_t n_features = vocab.size() - 2;

    std::vector<SparseVector> x_train = vectorize(train, vocab, stopwords);
    std::vector<SparseVector> x_test = vectorize(test, vocab, stopwords);
    if (resolve_features(options.algorithm, options.features) == FeatureKind::Tfidf) {
      const auto idf = text::IdfWeights::fit(x_train);
      for (auto& v : x_train) v = idf.apply(v);
      for (auto& v : x_test) v = idf.apply(v);
    }
    for (auto& v : x_train) v = shift_features(std::move(v));
    for (auto& v : x_test) v = shift_features(std::move(v));

    switch (options.algorithm) {
      case Algorithm::NaiveBayes: {
        const NbModel model = nb_fit(x_train, y_train, n_features, options.alpha);
        for (std::size_t i = 0; i < test.size(); ++i) {
          const NbPrediction p = nb_predict(model, x_test[i]);
          preds[i] = p.label;
          scores[i] = nb_posterior(p)[1];
        }
        break;
      }
      case Algorithm::Logistic:
      case Algorithm::LinearSvm: {
        LinearOptions lo;
        lo.kind = options.algorithm == Algorithm::Logistic ? LinearKind::Logistic : LinearKind::Hinge;
        lo.learning_rate = options.learning_rate;
        lo.l2 = options.l2;
        lo.epochs = options.epochs;
        Rng rng(options.seed);
        const LinearModel model = linear_fit(x_train, y_train, n_features, lo, rng);
        for (std::size_t i = 0; i < test.size(); ++i) {
          preds[i] = model.predict(x_test[i]);
          scores[i] = model.decision(x_test[i]);
        }
        break;
      }
      case Algorithm::Knn: {
        if (options.k < 1 || options.k > train.size())
          throw ConfigError("baseline: k must be between 1 and the training size (" + std::to_string(train.size()) +
                            ")");
        const KnnIndex index(x_train, y_train);
        for (std::size_t i = 0; i < test.size(); ++i) {
          preds[i] = index.predict(x_test[i], options.k);
          scores[i] = index.score(x_test[i], options.k);
        }
        break;
      }
      case Algorithm::Majority:
        break;
    }
  }

  eval::EvalReport report = eval::metrics(eval::confusion(preds, y_test));
  const bool has_pos = std::find(y_test.begin(), y_test.end(), 1) != y_test.end();
  const bool has_neg = std::find(y_test.begin(), y_test.end(), 0) != y_test.end();
  if (has_pos && has_neg) report.auc = eval::roc_auc(scores, y_test);
  return report;
}

}  // namespace bgcnn::baselines
