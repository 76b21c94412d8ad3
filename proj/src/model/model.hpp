// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nn/layers.hpp"
#include "tensor/autodiff.hpp"
#include "tensor/rng.hpp"

namespace bgcnn {

/// Hyperparameters of the network and its training loop.
struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t max_len = 40;
  std::size_t embed_dim = 100;
  std::size_t conv_filters = 64;
  std::size_t kernel_size = 3;
  std::size_t pool = 2;
  std::size_t gru1_hidden = 64;
  std::size_t gru2_hidden = 32;
  std::size_t dense_hidden = 64;
  double dropout_rate = 0.5;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  std::uint64_t seed = 1337;
  double pos_weight = 1.0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  std::size_t pooled_len() const { return (max_len + pool - 1) / pool; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Learnable weights of the stack
///   Input -> Embedding -> Conv1D(ReLU) -> MaxPool -> BiGRU(seq) -> BiGRU(last)
///   -> Dense(ReLU) -> Dropout -> Dense(1, sigmoid).
template <typename T>
struct ModelParams {
  ModelConfig config;
  BasicTensor<T> embedding;  // [V x d_e]
  nn::ConvParams<T> conv;
  nn::GruParams<T> gru1_fwd, gru1_bwd;
  nn::GruParams<T> gru2_fwd, gru2_bwd;
  nn::DenseParams<T> dense1;
  nn::DenseParams<T> dense2;

  /// Every learnable tensor with a stable name, in serialization order.
  std::vector<NamedTensor<T>> tensors();

  std::size_t parameter_count();
  void zero_grad();

  template <typename U>
  ModelParams<U> cast() const;
};

/// Allocates and initializes all weights (Glorot-uniform matrices, zero
/// biases). Deterministic in the given generator.
template <typename T>
ModelParams<T> build_model(const ModelConfig& config, Rng& rng);

/// Probabilities [batch x 1] for `ids` (row-major [batch x max_len]).
/// `rng` drives dropout and is only consumed when training.
template <typename T>
ad::Var<T> forward(ModelParams<T>& params, ad::Tape<T>& tape, std::span<const std::int32_t> ids, std::size_t batch,
                   bool training, Rng& rng);

/// Mean binary cross-entropy; probabilities clipped to [1e-7, 1 - 1e-7].
double loss_bce(std::span<const float> probabilities, std::span<const float> labels, double pos_weight = 1.0);

}  // namespace bgcnn
