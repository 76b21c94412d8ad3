// SPDX-License-Identifier: Apache-2.0
#include "nn/layers.hpp"

#include <cmath>

namespace bgcnn::nn {

template <typename T>
void glorot_uniform(BasicTensor<T>& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const float limit = std::sqrt(6.0f / static_cast<float>(fan_in + fan_out));
  for (T& v : t.data()) v = static_cast<T>(rng.uniform_float(-limit, limit));
}

template <typename T>
GruParams<T> GruParams<T>::init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  require(input_dim > 0 && hidden_dim > 0, "GRU dimensions must be positive");
  GruParams p;
  for (auto* w : {&p.w_z, &p.w_r, &p.w_h}) {
    *w = BasicTensor<T>({input_dim, hidden_dim});
    glorot_uniform(*w, input_dim, hidden_dim, rng);
  }
  for (auto* u : {&p.u_z, &p.u_r, &p.u_h}) {
    *u = BasicTensor<T>({hidden_dim, hidden_dim});
    glorot_uniform(*u, hidden_dim, hidden_dim, rng);
  }
  for (auto* b : {&p.b_z, &p.b_r, &p.b_h}) *b = BasicTensor<T>({hidden_dim});
  return p;
}

template <typename T>
void GruParams<T>::append_tensors(const std::string& prefix, std::vector<NamedTensor<T>>& out) {
  out.push_back({prefix + ".w_z", &w_z});
  out.push_back({prefix + ".w_r", &w_r});
  out.push_back({prefix + ".w_h", &w_h});
  out.push_back({prefix + ".u_z", &u_z});
  out.push_back({prefix + ".u_r", &u_r});
  out.push_back({prefix + ".u_h", &u_h});
  out.push_back({prefix + ".b_z", &b_z});
  out.push_back({prefix + ".b_r", &b_r});
  out.push_back({prefix + ".b_h", &b_h});
}

template <typename T>
GruVars<T> bind(ad::Tape<T>& tape, GruParams<T>& p) {
  return {tape.parameter(p.w_z), tape.parameter(p.w_r), tape.parameter(p.w_h),
          tape.parameter(p.u_z), tape.parameter(p.u_r), tape.parameter(p.u_h),
          tape.parameter(p.b_z), tape.parameter(p.b_r), tape.parameter(p.b_h)};
}

template <typename T>
ConvParams<T> ConvParams<T>::init(std::size_t input_dim, std::size_t n_filters, std::size_t kernel_size,
                                  Rng& rng) {
  if (kernel_size == 0 || kernel_size % 2 == 0)
    throw ConfigError("kernel_size must be odd, got " + std::to_string(kernel_size));
  require(input_dim > 0 && n_filters > 0, "conv dimensions must be positive");
  ConvParams p;
  p.kernels = BasicTensor<T>({n_filters, kernel_size, input_dim});
  glorot_uniform(p.kernels, kernel_size * input_dim, kernel_size * n_filters, rng);
  p.bias = BasicTensor<T>({n_filters});
  return p;
}

template <typename T>
void ConvParams<T>::append_tensors(const std::string& prefix, std::vector<NamedTensor<T>>& out) {
  out.push_back({prefix + ".kernels", &kernels});
  out.push_back({prefix + ".bias", &bias});
}

template <typename T>
DenseParams<T> DenseParams<T>::init(std::size_t input_dim, std::size_t output_dim, Rng& rng) {
  require(input_dim > 0 && output_dim > 0, "dense dimensions must be positive");
  DenseParams p;
  p.weight = BasicTensor<T>({input_dim, output_dim});
  glorot_uniform(p.weight, input_dim, output_dim, rng);
  p.bias = BasicTensor<T>({output_dim});
  return p;
}

template <typename T>
void DenseParams<T>::append_tensors(const std::string& prefix, std::vector<NamedTensor<T>>& out) {
  out.push_back({prefix + ".weight", &weight});
  out.push_back({prefix + ".bias", &bias});
}

template <typename T>
Var<T> embedding_forward(std::span<const std::int32_t> ids, std::size_t batch, std::size_t len, Var<T> table) {
  return ad::embedding(ids, batch, len, table);
}

template <typename T>
Var<T> conv1d_forward(Var<T> x, Var<T> kernels, Var<T> bias) {
  return ad::relu(ad::conv1d_same(x, kernels, bias));
}

template <typename T>
Var<T> maxpool1d(Var<T> x, std::size_t pool) {
  return ad::maxpool1d(x, pool);
}

template <typename T>
Var<T> gru_step(Var<T> x_t, Var<T> h_prev, const GruVars<T>& p) {
  using namespace ad;
  require(x_t.shape().size() == 2 && h_prev.shape().size() == 2 && x_t.shape()[0] == h_prev.shape()[0],
          "gru_step: expected x_t [B x d_in] and h_prev [B x d_h]");
  Var<T> z = sigmoid(add_bias(add(matmul(x_t, p.w_z), matmul(h_prev, p.u_z)), p.b_z));
  Var<T> r = sigmoid(add_bias(add(matmul(x_t, p.w_r), matmul(h_prev, p.u_r)), p.b_r));
  Var<T> candidate = tanh(add_bias(add(matmul(x_t, p.w_h), matmul(mul(r, h_prev), p.u_h)), p.b_h));
  return add(mul(one_minus(z), h_prev), mul(z, candidate));
}

template <typename T>
Var<T> gru_scan(Var<T> x, const GruVars<T>& p, bool reverse) {
  using namespace ad;
  const Shape& xs = x.shape();
  require(xs.size() == 3, "gru: expected input [B x T x d_in], got " + shape_string(xs));
  const std::size_t B = xs[0], T_ = xs[1], D = xs[2];
  const std::size_t H = p.w_z.shape()[1];
  require(p.w_z.shape()[0] == D, "gru: input width " + std::to_string(D) + " does not match W_z " +
                                     shape_string(p.w_z.shape()));
  // Input projections for every step at once; the recurrence runs as one op.
  Var<T> flat = reshape(x, {B * T_, D});
  auto project = [&](Var<T> w, Var<T> b) { return reshape(add_bias(matmul(flat, w), b), {B, T_, H}); };
  return gru_recurrence(project(p.w_z, p.b_z), project(p.w_r, p.b_r), project(p.w_h, p.b_h), p.u_z, p.u_r, p.u_h,
                        reverse);
}

template <typename T>
Var<T> bigru_forward(Var<T> x, const GruVars<T>& fwd, const GruVars<T>& bwd, bool return_sequences) {
  require(x.shape().size() == 3 && x.shape()[1] >= 1, "bigru: sequence length must be >= 1");
  Var<T> forward_states = gru_scan(x, fwd, false);
  Var<T> backward_states = gru_scan(x, bwd, true);
  if (return_sequences) return ad::concat_last(forward_states, backward_states);
  const std::size_t last = x.shape()[1] - 1;
  return ad::concat_last(ad::time_slice(forward_states, last), ad::time_slice(backward_states, 0));
}

template <typename T>
Var<T> dense_forward(Var<T> x, Var<T> weight, Var<T> bias, Activation activation) {
  Var<T> pre = ad::add_bias(ad::matmul(x, weight), bias);
  switch (activation) {
    case Activation::Relu:
      return ad::relu(pre);
    case Activation::Sigmoid:
      return ad::sigmoid(pre);
    case Activation::None:
      break;
  }
  return pre;
}

template <typename T>
Var<T> dropout(Var<T> x, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  if (!training || rate == 0.0) return x;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  std::vector<T> mask(x.value().size());
  for (T& m : mask) m = rng.bernoulli(rate) ? T(0) : keep_scale;
  return ad::apply_mask(x, std::move(mask));
}

#define BGCNN_INSTANTIATE(T)                                                                        \
  template void glorot_uniform(BasicTensor<T>&, std::size_t, std::size_t, Rng&);                   \
  template struct GruParams<T>;                                                                    \
  template struct ConvParams<T>;                                                                   \
  template struct DenseParams<T>;                                                                  \
  template GruVars<T> bind(ad::Tape<T>&, GruParams<T>&);                                           \
  template Var<T> embedding_forward(std::span<const std::int32_t>, std::size_t, std::size_t, Var<T>); \
  template Var<T> conv1d_forward(Var<T>, Var<T>, Var<T>);                                          \
  template Var<T> maxpool1d(Var<T>, std::size_t);                                                  \
  template Var<T> gru_step(Var<T>, Var<T>, const GruVars<T>&);                                     \
  template Var<T> gru_scan(Var<T>, const GruVars<T>&, bool);                                      \
  template Var<T> bigru_forward(Var<T>, const GruVars<T>&, const GruVars<T>&, bool);               \
  template Var<T> dense_forward(Var<T>, Var<T>, Var<T>, Activation);                               \
  template Var<T> dropout(Var<T>, double, bool, Rng&);

BGCNN_INSTANTIATE(float)
BGCNN_INSTANTIATE(double)

#undef BGCNN_INSTANTIATE

}  // namespace bgcnn::nn
