// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "data/corpus.hpp"
#include "eval/metrics.hpp"
#include "text/text.hpp"

namespace bgcnn::baselines {

enum class Algorithm { NaiveBayes, Logistic, LinearSvm, Knn, Majority };
enum class FeatureKind { Default, Counts, Tfidf };

struct BaselineOptions {
  Algorithm algorithm = Algorithm::Logistic;
  FeatureKind features = FeatureKind::Default;
  std::size_t k = 5;
  double learning_rate = 0.5;
  double l2 = 1e-5;
  std::size_t epochs = 10;
  double alpha = 1.0;
  std::uint64_t seed = 1337;
  std::size_t min_freq = 2;
  std::size_t max_vocab = 20000;
};

/// Counts for naive Bayes, TF-IDF for everything else.
FeatureKind resolve_features(Algorithm algorithm, FeatureKind requested);

std::optional<Algorithm> parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm algorithm);
/// Human label used in reports ("Logistic Regression", ...).
std::string_view algorithm_title(Algorithm algorithm);
/// "nb, logreg, svm, knn, majority".
std::string supported_algorithms();

std::optional<FeatureKind> parse_features(std::string_view name);

/// Preprocesses both sets, builds the vocabulary and idf on `train` only,
/// fits the chosen classifier and evaluates it on `test`.
eval::EvalReport run_baseline(const BaselineOptions& options, const std::vector<data::RawTweet>& train,
                              const std::vector<data::RawTweet>& test,
                              const text::StopwordSet& stopwords = text::default_stopwords());

}  // namespace bgcnn::baselines
