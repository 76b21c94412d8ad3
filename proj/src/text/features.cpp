// SPDX-License-Identifier: Apache-2.0
#include "text/features.hpp"

#include <cmath>
#include <map>

#include "common/error.hpp"

namespace bgcnn::text {

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double SparseVector::dot(const SparseVector& other) const {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < indices.size() && j < other.indices.size()) {
    if (indices[i] == other.indices[j]) {
      s += values[i] * other.values[j];
      ++i;
      ++j;
    } else if (indices[i] < other.indices[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

SparseVector count_vectorize(const Tokens& tokens, const Vocabulary& vocab) {
  std::map<std::int32_t, double> counts;
  for (const auto& t : tokens) {
    const std::int32_t id = vocab.id(t);
    if (id == Vocabulary::kOovId || id == Vocabulary::kPadId) continue;
    counts[id] += 1.0;
  }
  SparseVector v;
  for (auto [id, c] : counts) {
    v.indices.push_back(id);
    v.values.push_back(c);
  }
  return v;
}

IdfWeights IdfWeights::fit(const std::vector<SparseVector>& counts) {
  IdfWeights w;
  w.n_docs_ = counts.size();
  for (const auto& doc : counts) {
    for (std::int32_t idx : doc.indices) {
      require(idx >= 0, "feature indices must be nonnegative");
      const auto u = static_cast<std::size_t>(idx);
      if (u >= w.df_.size()) w.df_.resize(u + 1, 0);
      ++w.df_[u];
    }
  }
  return w;
}

double IdfWeights::idf(std::int32_t feature) const {
  const auto u = static_cast<std::size_t>(feature);
  const std::size_t df = u < df_.size() ? df_[u] : 0;
  return std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + static_cast<double>(df))) + 1.0;
}

SparseVector IdfWeights::apply(const SparseVector& counts) const {
  SparseVector out = counts;
  for (std::size_t i = 0; i < out.indices.size(); ++i) out.values[i] *= idf(out.indices[i]);
  const double n = out.norm();
  if (n > 0.0)
    for (double& v : out.values) v /= n;
  return out;
}

std::vector<SparseVector> tfidf_transform(const std::vector<SparseVector>& counts, std::size_t n_docs) {
  require(n_docs >= 1 && n_docs == counts.size(),
          "tfidf_transform: n_docs (" + std::to_string(n_docs) + ") must equal the number of documents (" +
              std::to_string(counts.size()) + ") and be >= 1");
  const IdfWeights weights = IdfWeights::fit(counts);
  std::vector<SparseVector> out;
  out.reserve(counts.size());
  for (const auto& doc : counts) out.push_back(weights.apply(doc));
  return out;
}

}  // namespace bgcnn::text
