// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "data/corpus.hpp"
#include "eval/history.hpp"
#include "model/model.hpp"
#include "text/vocab.hpp"

namespace bgcnn {

/// Fixed-length id rows plus labels, ready for batching.
struct EncodedSet {
  std::size_t max_len = 0;
  std::vector<std::int32_t> ids;  // [size() x max_len]
  std::vector<float> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const std::int32_t> row(std::size_t i) const { return {ids.data() + i * max_len, max_len}; }
};

EncodedSet encode_set(const std::vector<data::RawTweet>& records, const text::Vocabulary& vocab,
                      const text::StopwordSet& stopwords, std::size_t max_len);

/// Inference-mode probabilities for every row of `set`.
std::vector<double> predict_proba(ModelParams<float>& params, const EncodedSet& set);

using EpochCallback = std::function<void(const eval::EpochRecord&)>;

/// Minibatch training with Adam for params.config.epochs epochs. Each epoch
/// shuffles the training rows, keeps the last partial batch, and ends with
/// an inference pass that fills one EpochRecord. `val` may be null or empty.
/// A non-finite loss or gradient raises NumericError naming epoch and batch.
std::vector<eval::EpochRecord> train(ModelParams<float>& params, const EncodedSet& train_set, const EncodedSet* val,
                                     const EpochCallback& on_epoch = {});

/// Trained weights together with the preprocessing they expect.
struct Classifier {
  ModelParams<float> params;
  text::Vocabulary vocab;
  text::StopwordSet stopwords = text::default_stopwords();

  double probability(std::string_view raw_text);
  std::vector<double> probabilities(const std::vector<std::string>& raw_texts);
};

/// label = 1 iff probability >= threshold.
inline int decide(double probability, double threshold) { return probability >= threshold ? 1 : 0; }

}  // namespace bgcnn
