// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tensor/autodiff.hpp"
#include "tensor/rng.hpp"
#include "tensor/tensor.hpp"

namespace bgcnn::nn {

using ad::Var;

/// Glorot-uniform fill: U(-l, l) with l = sqrt(6 / (fan_in + fan_out)).
template <typename T>
void glorot_uniform(BasicTensor<T>& t, std::size_t fan_in, std::size_t fan_out, Rng& rng);

// Standard GRU cell:
//   z  = sigmoid(x W_z + h U_z + b_z)
//   r  = sigmoid(x W_r + h U_r + b_r)
//   h~ = tanh(x W_h + (r * h) U_h + b_h)
//   h' = (1 - z) * h + z * h~
template <typename T>
struct GruParams {
  BasicTensor<T> w_z, w_r, w_h;  // [d_in x d_h]
  BasicTensor<T> u_z, u_r, u_h;  // [d_h x d_h]
  BasicTensor<T> b_z, b_r, b_h;  // [d_h]

  static GruParams init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

  std::size_t input_dim() const { return w_z.dim(0); }
  std::size_t hidden_dim() const { return w_z.dim(1); }
  void append_tensors(const std::string& prefix, std::vector<NamedTensor<T>>& out);
};

/// Tape bindings of a GruParams.
template <typename T>
struct GruVars {
  Var<T> w_z, w_r, w_h, u_z, u_r, u_h, b_z, b_r, b_h;
};

template <typename T>
GruVars<T> bind(ad::Tape<T>& tape, GruParams<T>& p);

template <typename T>
struct ConvParams {
  BasicTensor<T> kernels;  // [n_filters x kernel_size x d_in]
  BasicTensor<T> bias;     // [n_filters]

  static ConvParams init(std::size_t input_dim, std::size_t n_filters, std::size_t kernel_size, Rng& rng);
  void append_tensors(const std::string& prefix, std::vector<NamedTensor<T>>& out);
};

template <typename T>
struct DenseParams {
  BasicTensor<T> weight;  // [d_in x d_out]
  BasicTensor<T> bias;    // [d_out]

  static DenseParams init(std::size_t input_dim, std::size_t output_dim, Rng& rng);
  void append_tensors(const std::string& prefix, std::vector<NamedTensor<T>>& out);
};

enum class Activation { None, Relu, Sigmoid };

/// ids [batch x len] -> [batch x len x d_e].
template <typename T>
Var<T> embedding_forward(std::span<const std::int32_t> ids, std::size_t batch, std::size_t len, Var<T> table);

/// Same-padded Conv1D followed by ReLU: [B x T x d_in] -> [B x T x n_filters].
template <typename T>
Var<T> conv1d_forward(Var<T> x, Var<T> kernels, Var<T> bias);

template <typename T>
Var<T> maxpool1d(Var<T> x, std::size_t pool);

/// One GRU step on a batch: x_t [B x d_in], h_prev [B x d_h] -> [B x d_h].
template <typename T>
Var<T> gru_step(Var<T> x_t, Var<T> h_prev, const GruVars<T>& p);

/// Bidirectional GRU over x [B x T x d_in] with zero initial states.
/// return_sequences: [B x T x 2d_h] with [h_fwd_t ; h_bwd_t] per step.
/// Otherwise [B x 2d_h] = [h_fwd_T ; h_bwd_1].
template <typename T>
Var<T> bigru_forward(Var<T> x, const GruVars<T>& fwd, const GruVars<T>& bwd, bool return_sequences);

/// Runs one GRU direction and returns the states [B x T x d_h] in input
/// order. `reverse` scans t = T..1.
template <typename T>
Var<T> gru_scan(Var<T> x, const GruVars<T>& p, bool reverse);

/// activation(x W + b) for x [B x d_in].
template <typename T>
Var<T> dense_forward(Var<T> x, Var<T> weight, Var<T> bias, Activation activation);

/// Inverted dropout. Identity (the same Var) when !training or rate == 0.
template <typename T>
Var<T> dropout(Var<T> x, double rate, bool training, Rng& rng);

}  // namespace bgcnn::nn
