// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "text/vocab.hpp"

namespace bgcnn::text {

/// Sparse nonnegative feature vector; indices strictly increasing.
struct SparseVector {
  std::vector<std::int32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  double norm() const;
  double dot(const SparseVector& other) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Occurrence counts keyed by vocabulary id. OOV tokens are ignored and
/// PAD is never emitted.
SparseVector count_vectorize(const Tokens& tokens, const Vocabulary& vocab);

/// Smoothed idf weights fitted on a document collection:
/// idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1.
class IdfWeights {
 public:
  static IdfWeights fit(const std::vector<SparseVector>& counts);

  /// tf * idf, then L2-normalized (an all-zero vector stays zero). Features
  /// unseen during fit get idf(t) = ln(1 + n_docs) + 1.
  SparseVector apply(const SparseVector& counts) const;

  double idf(std::int32_t feature) const;
  std::size_t n_docs() const { return n_docs_; }

 private:
  std::size_t n_docs_ = 0;
  std::vector<std::size_t> df_;
};

/// Fits idf on `counts` and applies it to each of them. n_docs must equal
/// counts.size() and be >= 1.
std::vector<SparseVector> tfidf_transform(const std::vector<SparseVector>& counts, std::size_t n_docs);

}  // namespace bgcnn::text
