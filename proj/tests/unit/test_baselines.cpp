// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "baselines/baselines.hpp"
#include "baselines/runner.hpp"
#include "common/error.hpp"

using namespace bgcnn;
using namespace bgcnn::baselines;

namespace {

SparseVector sv(std::vector<std::int32_t> idx, std::vector<double> val) { return {std::move(idx), std::move(val)}; }

std::vector<SparseVector> random_docs(std::size_t n, std::size_t v, Rng& rng) {
  std::vector<SparseVector> docs(n);
  for (auto& d : docs)
    for (std::size_t t = 0; t < v; ++t)
      if (rng.bernoulli(0.4)) {
        d.indices.push_back(static_cast<std::int32_t>(t));
        d.values.push_back(static_cast<double>(1 + rng.below(3)));
      }
  return docs;
}

}  // namespace

TEST_CASE("nb_fit examples") {
  const std::vector<SparseVector> docs = {sv({0}, {2}), sv({1}, {1})};
  const std::vector<int> labels = {0, 1};
  const auto m = nb_fit(docs, labels, 2, 1.0);
  CHECK(m.class_log_prior[0] == doctest::Approx(std::log(0.5)));
  CHECK(m.class_log_prior[1] == doctest::Approx(std::log(0.5)));
  CHECK(std::exp(m.feature_log_prob[0][0]) == doctest::Approx(0.75));

  const auto smooth = nb_fit(docs, labels, 2, 1e6);
  for (int c = 0; c < 2; ++c)
    for (double lp : smooth.feature_log_prob[c]) CHECK(std::exp(lp) == doctest::Approx(0.5).epsilon(1e-3));

  for (int c = 0; c < 2; ++c) {
    double total = 0;
    for (double lp : m.feature_log_prob[c]) total += std::exp(lp);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(nb_fit(docs, std::vector<int>{0, 0}, 2), ConfigError);
}

TEST_CASE("nb_predict") {
  const std::vector<SparseVector> docs = {sv({0}, {2}), sv({1}, {1}), sv({1}, {1})};
  const std::vector<int> labels = {0, 1, 1};
  const auto m = nb_fit(docs, labels, 2);
  const auto empty = nb_predict(m, SparseVector{});
  CHECK(empty.label == 1);
  CHECK(empty.log_posterior[1] == m.class_log_prior[1]);
  CHECK(nb_predict(m, sv({0}, {3})).label == 0);
  const auto post = nb_posterior(nb_predict(m, sv({0, 1}, {1, 1})));
  CHECK(post[0] + post[1] == doctest::Approx(1.0).epsilon(1e-9));

  // equal priors and an empty document tie -> label 0
  const auto tied = nb_fit(std::vector<SparseVector>{sv({0}, {1}), sv({1}, {1})}, std::vector<int>{0, 1}, 2);
  CHECK(nb_predict(tied, SparseVector{}).label == 0);
}

TEST_CASE("nb duplicating a document widens its own class margin") {
  Rng rng(12);
  auto docs = random_docs(10, 6, rng);
  std::vector<int> labels(10);
  for (std::size_t i = 0; i < 10; ++i) labels[i] = static_cast<int>(i % 2);
  const auto base = nb_fit(docs, labels, 6);
  const auto before = nb_predict(base, docs[3]);
  docs.push_back(docs[3]);
  labels.push_back(labels[3]);
  const auto after = nb_predict(nb_fit(docs, labels, 6), docs[3]);
  const int c = labels[3];
  CHECK(after.log_posterior[c] - after.log_posterior[1 - c] > before.log_posterior[c] - before.log_posterior[1 - c]);
}

TEST_CASE("linear models") {
  const std::vector<SparseVector> docs = {sv({0}, {1}), sv({0}, {-1})};
  const std::vector<int> labels = {1, 0};
  for (auto kind : {LinearKind::Logistic, LinearKind::Hinge}) {
    LinearOptions o;
    o.kind = kind;
    o.learning_rate = 0.0;
    Rng rng(1);
    const auto frozen = linear_fit(docs, labels, 1, o, rng);
    CHECK(frozen.weights == std::vector<double>{0.0});
    CHECK(frozen.bias == 0.0);

    o.learning_rate = 0.1;
    Rng rng2(1);
    const auto m = linear_fit(docs, labels, 1, o, rng2);
    CHECK(m.weights[0] > 0.0);
    CHECK(m.predict(docs[0]) == 1);
    CHECK(m.predict(docs[1]) == 0);

    o.l2 = 0.0;
    Rng r3(5);
    const auto free = linear_fit(docs, labels, 1, o, r3);
    o.l2 = 1e3;
    o.learning_rate = 1e-4;
    Rng r4(5);
    const auto shrunk = linear_fit(docs, labels, 1, o, r4);
    o.l2 = 0.0;
    Rng r5(5);
    const auto unshrunk = linear_fit(docs, labels, 1, o, r5);
    CHECK(std::abs(shrunk.weights[0]) < std::abs(unshrunk.weights[0]));
    CHECK(std::isfinite(free.weights[0]));
  }
  LinearOptions o;
  o.epochs = 0;
  Rng rng(1);
  CHECK_THROWS_AS(linear_fit(docs, labels, 1, o, rng), ConfigError);
}

TEST_CASE("logistic scores are probabilities consistent with the sign rule") {
  Rng rng(3);
  const auto docs = random_docs(40, 8, rng);
  std::vector<int> labels(40);
  for (std::size_t i = 0; i < 40; ++i) labels[i] = static_cast<int>(rng.below(2));
  LinearOptions o;
  const auto m = linear_fit(docs, labels, 8, o, rng);
  for (const auto& d : docs) {
    const double s = m.score(d);
    CHECK((s > 0.0 && s < 1.0));
    CHECK((s >= 0.5) == (m.decision(d) >= 0.0));
  }
}

TEST_CASE("knn examples and oracle") {
  const std::vector<SparseVector> docs = {sv({0}, {1}), sv({1}, {1}), sv({0, 1}, {1, 1}), sv({2}, {1})};
  const std::vector<int> labels = {1, 0, 0, 1};
  for (std::size_t i = 0; i < docs.size(); ++i) CHECK(knn_predict(docs, labels, docs[i], 1) == labels[i]);
  CHECK(knn_predict(docs, labels, sv({0}, {1}), 4) == 0);  // 2 vs 2 -> label 0
  CHECK_THROWS_AS(knn_predict(std::vector<SparseVector>{}, std::vector<int>{}, docs[0], 1), ContractViolation);
  CHECK_THROWS_AS(knn_predict(docs, labels, docs[0], 5), ContractViolation);

  Rng rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    const auto train = random_docs(30, 6, rng);
    std::vector<int> y(30);
    for (auto& v : y) v = static_cast<int>(rng.below(2));
    const auto q = random_docs(1, 6, rng)[0];
    std::vector<std::size_t> order(30);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> sim(30);
    for (std::size_t i = 0; i < 30; ++i) sim[i] = cosine_similarity(q, train[i]);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sim[a] > sim[b]; });
    int pos = 0;
    for (std::size_t i = 0; i < 3; ++i) pos += y[order[i]];
    CHECK(knn_predict(train, y, q, 3) == (2 * pos > 3 ? 1 : 0));
  }
}

TEST_CASE("baseline runner") {
  std::vector<data::RawTweet> train, test;
  for (int i = 0; i < 40; ++i) {
    const int label = i % 4 == 0;
    const std::string text = label ? "you stupid idiot loser number" : "lovely sunny morning coffee number";
    (i < 30 ? train : test).push_back({std::to_string(i), text + " " + std::to_string(i % 3), label});
  }
  for (auto name : {"nb", "logreg", "svm", "knn", "majority"}) {
    BaselineOptions o;
    o.algorithm = *parse_algorithm(name);
    o.k = 3;
    const auto r = run_baseline(o, train, test);
    CHECK(r.confusion.total() == test.size());
    if (std::string(name) != "majority") CHECK(r.accuracy == 1.0);
  }
  CHECK_FALSE(parse_algorithm("rf").has_value());
  CHECK(parse_algorithm("lr") == Algorithm::Logistic);
  CHECK(resolve_features(Algorithm::NaiveBayes, FeatureKind::Default) == FeatureKind::Counts);
  CHECK(resolve_features(Algorithm::Knn, FeatureKind::Default) == FeatureKind::Tfidf);
  CHECK(resolve_features(Algorithm::Knn, FeatureKind::Counts) == FeatureKind::Counts);
  CHECK(supported_algorithms() == "nb, logreg, svm, knn, majority");
}
