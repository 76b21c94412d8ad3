// SPDX-License-Identifier: Apache-2.0
#include "model/trainer.hpp"

#include <cmath>
#include <numeric>

#include "common/error.hpp"
#include "eval/metrics.hpp"
#include "model/adam.hpp"

namespace bgcnn {

namespace {

constexpr std::size_t kInferenceBatch = 256;
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDropoutStream = 2;

struct SetSummary {
  double loss = 0.0;
  double accuracy = 0.0;
  double recall = 0.0;
  std::optional<double> auc;
};

SetSummary summarize(ModelParams<float>& params, const EncodedSet& set) {
  const std::vector<double> p = predict_proba(params, set);
  std::vector<float> pf(p.begin(), p.end());
  std::vector<int> truth(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) truth[i] = set.labels[i] > 0.5f ? 1 : 0;
  const eval::EvalReport report = eval::evaluate(p, truth, 0.5);
  SetSummary s;
  s.loss = loss_bce(pf, set.labels, params.config.pos_weight);
  s.accuracy = report.accuracy;
  s.recall = report.recall;
  s.auc = report.auc;
  return s;
}

bool all_finite(std::span<const float> values) {
  for (float v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

EncodedSet encode_set(const std::vector<data::RawTweet>& records, const text::Vocabulary& vocab,
                      const text::StopwordSet& stopwords, std::size_t max_len) {
  EncodedSet set;
  set.max_len = max_len;
  set.ids.reserve(records.size() * max_len);
  set.labels.reserve(records.size());
  for (const auto& r : records) {
    const auto ids = text::encode(text::preprocess(r.text, stopwords), vocab, max_len);
    set.ids.insert(set.ids.end(), ids.begin(), ids.end());
    set.labels.push_back(static_cast<float>(r.label));
  }
  return set;
}

std::vector<double> predict_proba(ModelParams<float>& params, const EncodedSet& set) {
  require(set.max_len == params.config.max_len, "predict: encoded length differs from the model's max_len");
  std::vector<double> out;
  out.reserve(set.size());
  Rng unused(0);
  for (std::size_t start = 0; start < set.size(); start += kInferenceBatch) {
    const std::size_t b = std::min(kInferenceBatch, set.size() - start);
    ad::Tape<float> tape(false);
    const auto probs = forward(params, tape, std::span(set.ids).subspan(start * set.max_len, b * set.max_len), b,
                               false, unused);
    for (float v : probs.value().data()) out.push_back(v);
  }
  return out;
}

std::vector<eval::EpochRecord> train(ModelParams<float>& params, const EncodedSet& train_set, const EncodedSet* val,
                                     const EpochCallback& on_epoch) {
  const ModelConfig& cfg = params.config;
  cfg.validate();
  if (train_set.size() == 0) throw ConfigError("training set is empty");
  require(train_set.max_len == cfg.max_len, "train: encoded length differs from the model's max_len");
  if (val && val->size() == 0) val = nullptr;

  const Rng root(cfg.seed);
  Rng shuffle_rng = root.fork(kShuffleStream);
  Rng dropout_rng = root.fork(kDropoutStream);
  Adam adam(params.tensors(), cfg.learning_rate);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::int32_t> batch_ids;
  std::vector<float> batch_labels;
  std::vector<eval::EpochRecord> history;
  history.reserve(cfg.epochs);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_no) {
      const std::size_t b = std::min(cfg.batch_size, order.size() - start);
      batch_ids.clear();
      batch_labels.clear();
      for (std::size_t k = 0; k < b; ++k) {
        const auto row = train_set.row(order[start + k]);
        batch_ids.insert(batch_ids.end(), row.begin(), row.end());
        batch_labels.push_back(train_set.labels[order[start + k]]);
      }
      const auto where = [&] {
        return "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_no + 1);
      };
      try {
        params.zero_grad();
        ad::Tape<float> tape;
        const auto probs = forward(params, tape, batch_ids, b, true, dropout_rng);
        const auto loss =
            ad::binary_cross_entropy(probs, batch_labels, static_cast<float>(cfg.pos_weight));
        if (!std::isfinite(loss.value()[0])) throw NumericError("loss is not finite");
        tape.backward(loss);
        for (const auto& t : params.tensors())
          if (!all_finite(t.tensor->grad())) throw NumericError("gradient of " + t.name + " is not finite");
        adam.step();
      } catch (const NumericError& e) {
        throw NumericError("training diverged at " + where() + ": " + e.what());
      }
    }

    eval::EpochRecord rec;
    rec.epoch = epoch;
    const SetSummary tr = summarize(params, train_set);
    rec.train_loss = tr.loss;
    rec.train_acc = tr.accuracy;
    if (val) {
      const SetSummary vs = summarize(params, *val);
      rec.val_loss = vs.loss;
      rec.val_acc = vs.accuracy;
      rec.val_recall = vs.recall;
      rec.val_auc = vs.auc;
    }
    if (!std::isfinite(rec.train_loss))
      throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": loss is not finite");
    history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  for (const auto& t : params.tensors()) t.tensor->drop_grad();
  return history;
}

double Classifier::probability(std::string_view raw_text) {
  const auto ids = text::encode(text::preprocess(raw_text, stopwords), vocab, params.config.max_len);
  ad::Tape<float> tape(false);
  Rng unused(0);
  return forward(params, tape, ids, 1, false, unused).value()[0];
}

std::vector<double> Classifier::probabilities(const std::vector<std::string>& raw_texts) {
  EncodedSet set;
  set.max_len = params.config.max_len;
  for (const auto& t : raw_texts) {
    const auto ids = text::encode(text::preprocess(t, stopwords), vocab, set.max_len);
    set.ids.insert(set.ids.end(), ids.begin(), ids.end());
    set.labels.push_back(0.0f);
  }
  if (set.size() == 0) return {};
  return predict_proba(params, set);
}

}  // namespace bgcnn
