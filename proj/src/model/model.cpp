// SPDX-License-Identifier: Apache-2.0
#include "model/model.hpp"

#include <algorithm>
#include <cmath>

namespace bgcnn {

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(vocab_size, "vocab_size");
  positive(max_len, "max_len");
  positive(embed_dim, "embed_dim");
  positive(conv_filters, "conv_filters");
  positive(kernel_size, "kernel_size");
  positive(pool, "pool");
  positive(gru1_hidden, "gru1_hidden");
  positive(gru2_hidden, "gru2_hidden");
  positive(dense_hidden, "dense_hidden");
  positive(batch_size, "batch_size");
  positive(epochs, "epochs");
  if (kernel_size % 2 == 0) throw ConfigError("kernel_size must be odd, got " + std::to_string(kernel_size));
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw ConfigError("dropout_rate must be in [0, 1), got " + std::to_string(dropout_rate));
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate must be a finite non-negative number");
  if (!(pos_weight > 0.0) || !std::isfinite(pos_weight)) throw ConfigError("pos_weight must be positive");
}

template <typename T>
std::vector<NamedTensor<T>> ModelParams<T>::tensors() {
  std::vector<NamedTensor<T>> out;
  out.push_back({"embedding", &embedding});
  conv.append_tensors("conv", out);
  gru1_fwd.append_tensors("gru1.fwd", out);
  gru1_bwd.append_tensors("gru1.bwd", out);
  gru2_fwd.append_tensors("gru2.fwd", out);
  gru2_bwd.append_tensors("gru2.bwd", out);
  dense1.append_tensors("dense1", out);
  dense2.append_tensors("dense2", out);
  return out;
}

template <typename T>
std::size_t ModelParams<T>::parameter_count() {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.tensor->size();
  return n;
}

template <typename T>
void ModelParams<T>::zero_grad() {
  for (const auto& t : tensors()) t.tensor->zero_grad();
}

template <typename T>
template <typename U>
ModelParams<U> ModelParams<T>::cast() const {
  auto gru = [](const nn::GruParams<T>& g) {
    return nn::GruParams<U>{g.w_z.template cast<U>(), g.w_r.template cast<U>(), g.w_h.template cast<U>(),
                            g.u_z.template cast<U>(), g.u_r.template cast<U>(), g.u_h.template cast<U>(),
                            g.b_z.template cast<U>(), g.b_r.template cast<U>(), g.b_h.template cast<U>()};
  };
  ModelParams<U> out;
  out.config = config;
  out.embedding = embedding.template cast<U>();
  out.conv = {conv.kernels.template cast<U>(), conv.bias.template cast<U>()};
  out.gru1_fwd = gru(gru1_fwd);
  out.gru1_bwd = gru(gru1_bwd);
  out.gru2_fwd = gru(gru2_fwd);
  out.gru2_bwd = gru(gru2_bwd);
  out.dense1 = {dense1.weight.template cast<U>(), dense1.bias.template cast<U>()};
  out.dense2 = {dense2.weight.template cast<U>(), dense2.bias.template cast<U>()};
  return out;
}

template <typename T>
ModelParams<T> build_model(const ModelConfig& config, Rng& rng) {
  config.validate();
  ModelParams<T> p;
  p.config = config;
  p.embedding = BasicTensor<T>({config.vocab_size, config.embed_dim});
  nn::glorot_uniform(p.embedding, config.vocab_size, config.embed_dim, rng);
  p.conv = nn::ConvParams<T>::init(config.embed_dim, config.conv_filters, config.kernel_size, rng);
  p.gru1_fwd = nn::GruParams<T>::init(config.conv_filters, config.gru1_hidden, rng);
  p.gru1_bwd = nn::GruParams<T>::init(config.conv_filters, config.gru1_hidden, rng);
  p.gru2_fwd = nn::GruParams<T>::init(2 * config.gru1_hidden, config.gru2_hidden, rng);
  p.gru2_bwd = nn::GruParams<T>::init(2 * config.gru1_hidden, config.gru2_hidden, rng);
  p.dense1 = nn::DenseParams<T>::init(2 * config.gru2_hidden, config.dense_hidden, rng);
  p.dense2 = nn::DenseParams<T>::init(config.dense_hidden, 1, rng);
  return p;
}

template <typename T>
ad::Var<T> forward(ModelParams<T>& params, ad::Tape<T>& tape, std::span<const std::int32_t> ids, std::size_t batch,
                   bool training, Rng& rng) {
  const ModelConfig& cfg = params.config;
  require(batch > 0, "forward: empty batch");
  require(ids.size() == batch * cfg.max_len, "forward: expected " + std::to_string(batch) + " x " +
                                                 std::to_string(cfg.max_len) + " ids, got " +
                                                 std::to_string(ids.size()));
  using nn::Activation;
  auto table = tape.parameter(params.embedding);
  auto x = nn::embedding_forward(ids, batch, cfg.max_len, table);
  x = nn::conv1d_forward(x, tape.parameter(params.conv.kernels), tape.parameter(params.conv.bias));
  x = nn::maxpool1d(x, cfg.pool);
  x = nn::bigru_forward(x, nn::bind(tape, params.gru1_fwd), nn::bind(tape, params.gru1_bwd), true);
  x = nn::bigru_forward(x, nn::bind(tape, params.gru2_fwd), nn::bind(tape, params.gru2_bwd), false);
  x = nn::dense_forward(x, tape.parameter(params.dense1.weight), tape.parameter(params.dense1.bias),
                        Activation::Relu);
  x = nn::dropout(x, cfg.dropout_rate, training, rng);
  return nn::dense_forward(x, tape.parameter(params.dense2.weight), tape.parameter(params.dense2.bias),
                           Activation::Sigmoid);
}

double loss_bce(std::span<const float> probabilities, std::span<const float> labels, double pos_weight) {
  require(probabilities.size() == labels.size(), "loss_bce: length mismatch");
  require(!labels.empty(), "loss_bce: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(static_cast<double>(probabilities[i]), ad::kProbabilityClip,
                                1.0 - ad::kProbabilityClip);
    const double y = labels[i];
    const double w = y > 0.5 ? pos_weight : 1.0;
    total += w * (y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  return -total / static_cast<double>(labels.size());
}

template struct ModelParams<float>;
template struct ModelParams<double>;
template ModelParams<double> ModelParams<float>::cast<double>() const;
template ModelParams<float> ModelParams<double>::cast<float>() const;
template ModelParams<float> build_model(const ModelConfig&, Rng&);
template ModelParams<double> build_model(const ModelConfig&, Rng&);
template ad::Var<float> forward(ModelParams<float>&, ad::Tape<float>&, std::span<const std::int32_t>, std::size_t,
                                bool, Rng&);
template ad::Var<double> forward(ModelParams<double>&, ad::Tape<double>&, std::span<const std::int32_t>,
                                 std::size_t, bool, Rng&);

}  // namespace bgcnn
