// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "tensor/rng.hpp"
#include "tensor/tensor.hpp"

namespace bgcnn::ad {

template <typename T>
class Tape;

/// Handle to a value recorded on a tape. Cheap to copy; only valid while the
/// tape is alive and has not been cleared.
template <typename T>
struct Var {
  Tape<T>* tape = nullptr;
  std::size_t id = 0;

  const BasicTensor<T>& value() const { return tape->value(id); }
  const Shape& shape() const { return value().shape(); }
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so walking the
/// node list backwards is a valid topological order for the adjoint sweep.
/// A fresh tape (or clear()) is used per forward pass.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  /// With `track_gradients` false, parameters are bound as plain inputs and
  /// no backward closures are kept (inference).
  explicit Tape(bool track_gradients = true) : track_gradients_(track_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf bound to an external tensor; its gradient accumulates into
  /// `p.grad()`. The tensor must outlive the tape's use.
  Var<T> parameter(BasicTensor<T>& p);

  /// Leaf that never receives a gradient.
  Var<T> constant(BasicTensor<T> value);

  /// Appends an op result. Throws NumericError if `value` is not finite.
  Var<T> record(BasicTensor<T> value, std::initializer_list<std::size_t> inputs, BackwardFn fn,
                std::string_view op);
  Var<T> record(BasicTensor<T> value, const std::vector<std::size_t>& inputs, BackwardFn fn,
                std::string_view op);

  const BasicTensor<T>& value(std::size_t id) const;
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }

  /// Gradient buffer for node `id`, allocated (zeroed) on first access.
  std::span<T> grad(std::size_t id);

  /// Seeds d(loss)/d(loss) = 1 and runs the adjoint sweep. Gradients of
  /// parameters accumulate; callers zero them between steps.
  void backward(Var<T> loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    BasicTensor<T> owned;
    BasicTensor<T>* external = nullptr;
    std::vector<T> grad;
    BackwardFn backward;
    bool needs_grad = false;
  };

  std::deque<Node> nodes_;  // deque: appends keep earlier value() references valid
  bool track_gradients_ = true;
};

// Pointwise arithmetic. Binary ops accept equal shapes or a single-element
// operand that is broadcast.
template <typename T> Var<T> add(Var<T> a, Var<T> b);
template <typename T> Var<T> sub(Var<T> a, Var<T> b);
template <typename T> Var<T> mul(Var<T> a, Var<T> b);
template <typename T> Var<T> scale(Var<T> a, T factor);
/// 1 - a
template <typename T> Var<T> one_minus(Var<T> a);
template <typename T> Var<T> sigmoid(Var<T> a);
template <typename T> Var<T> tanh(Var<T> a);
template <typename T> Var<T> relu(Var<T> a);

/// x[..., n] + b[n], bias broadcast over all leading dimensions.
template <typename T> Var<T> add_bias(Var<T> x, Var<T> b);

/// a[m x k] . b[k x n]
template <typename T> Var<T> matmul(Var<T> a, Var<T> b);

template <typename T> Var<T> reshape(Var<T> a, Shape shape);

/// Sum of all elements as a one-element tensor.
template <typename T> Var<T> sum(Var<T> a);

/// Rows of `table` [V x d] selected by `ids` (row-major [batch x len]),
/// producing [batch x len x d].
template <typename T>
Var<T> embedding(std::span<const std::int32_t> ids, std::size_t batch, std::size_t len, Var<T> table);

/// Same-padded cross-correlation along axis 1: x [B x T x C], kernel
/// [F x K x C], bias [F] -> [B x T x F]. K must be odd.
template <typename T> Var<T> conv1d_same(Var<T> x, Var<T> kernel, Var<T> bias);

/// Non-overlapping max over axis 1: [B x T x C] -> [B x ceil(T/pool) x C].
/// Gradient goes to the first maximal index of each window.
template <typename T> Var<T> maxpool1d(Var<T> x, std::size_t pool);

/// x[:, t, :] of a [B x T x C] tensor.
template <typename T> Var<T> time_slice(Var<T> x, std::size_t t);

/// Stacks T tensors of shape [B x C] into [B x T x C].
template <typename T> Var<T> stack_time(const std::vector<Var<T>>& steps);

/// Concatenation along the last axis; leading dimensions must agree.
template <typename T> Var<T> concat_last(Var<T> a, Var<T> b);

/// Recurrent half of a GRU with zero initial state. proj_z, proj_r, proj_h
/// [B x T x H] hold the input products plus biases; u_* are [H x H]. Per step
///   z = sigmoid(pz + h u_z), r = sigmoid(pr + h u_r),
///   c = tanh(ph + (r * h) u_h), h' = (1 - z) * h + z * c.
/// Returns every state [B x T x H] in input order; `reverse` scans t = T..1.
template <typename T>
Var<T> gru_recurrence(Var<T> proj_z, Var<T> proj_r, Var<T> proj_h, Var<T> u_z, Var<T> u_r, Var<T> u_h,
                      bool reverse);

/// Multiplies by a fixed mask (used for inverted dropout).
template <typename T> Var<T> apply_mask(Var<T> x, std::vector<T> mask);

/// Mean binary cross-entropy of probabilities `p` ([B] or [B x 1]) against
/// 0/1 labels. Probabilities are clipped to [1e-7, 1 - 1e-7]; the clip is
/// treated as identity in the backward pass. Positive-class terms are
/// multiplied by `pos_weight`.
template <typename T>
Var<T> binary_cross_entropy(Var<T> p, std::span<const float> labels, T pos_weight = T(1));

inline constexpr double kProbabilityClip = 1e-7;

}  // namespace bgcnn::ad
