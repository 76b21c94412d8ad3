// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "baselines/baselines.hpp"
#include "common/error.hpp"

namespace bgcnn::baselines {

double cosine_similarity(const SparseVector& a, const SparseVector& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

KnnIndex::KnnIndex(std::vector<SparseVector> docs, std::vector<int> labels)
    : docs_(std::move(docs)), labels_(std::move(labels)) {
  require(!docs_.empty(), "knn: empty training set");
  require(docs_.size() == labels_.size(), "knn: docs and labels differ in length");
  norms_.reserve(docs_.size());
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    require(labels_[i] == 0 || labels_[i] == 1, "knn: labels must be 0 or 1");
    norms_.push_back(docs_[i].norm());
    const auto& d = docs_[i];
    for (std::size_t j = 0; j < d.nnz(); ++j) {
      require(d.indices[j] >= 0, "knn: negative feature index");
      const auto t = static_cast<std::size_t>(d.indices[j]);
      if (t >= postings_.size()) postings_.resize(t + 1);
      postings_[t].emplace_back(i, d.values[j]);
    }
  }
}

std::vector<std::size_t> KnnIndex::neighbours(const SparseVector& query, std::size_t k) const {
  require(k >= 1 && k <= docs_.size(), "knn: k must be in [1, n_train]");
  // The postings only find documents sharing a feature with the query; their
  // similarity is recomputed like cosine_similarity so results match it bitwise.
  std::vector<char> touched(docs_.size(), 0);
  for (std::size_t j = 0; j < query.nnz(); ++j) {
    const auto t = static_cast<std::size_t>(query.indices[j]);
    if (query.indices[j] < 0 || t >= postings_.size()) continue;
    for (const auto& entry : postings_[t]) touched[entry.first] = 1;
  }
  const double qn = query.norm();
  std::vector<double> sims(docs_.size(), 0.0);
  for (std::size_t i = 0; i < docs_.size(); ++i)
    if (touched[i] && qn != 0.0 && norms_[i] != 0.0) sims[i] = query.dot(docs_[i]) / (qn * norms_[i]);

  std::vector<std::size_t> order(docs_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) { return sims[a] != sims[b] ? sims[a] > sims[b] : a < b; });
  order.resize(k);
  return order;
}

int KnnIndex::predict(const SparseVector& query, std::size_t k) const {
  std::size_t pos = 0;
  for (std::size_t i : neighbours(query, k)) pos += static_cast<std::size_t>(labels_[i]);
  return 2 * pos > k ? 1 : 0;
}

double KnnIndex::score(const SparseVector& query, std::size_t k) const {
  std::size_t pos = 0;
  for (std::size_t i : neighbours(query, k)) pos += static_cast<std::size_t>(labels_[i]);
  return static_cast<double>(pos) / static_cast<double>(k);
}

int knn_predict(std::span<const SparseVector> train_docs, std::span<const int> train_labels,
                const SparseVector& query, std::size_t k) {
  KnnIndex index(std::vector<SparseVector>(train_docs.begin(), train_docs.end()),
                 std::vector<int>(train_labels.begin(), train_labels.end()));
  return index.predict(query, k);
}

}  // namespace bgcnn::baselines
