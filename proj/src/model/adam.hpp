// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tensor/tensor.hpp"

namespace bgcnn {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One Adam step on a single buffer. `step` is the 1-based update count.
void adam_update(std::span<float> weight, std::span<const float> grad, std::span<float> m, std::span<float> v,
                 double learning_rate, std::size_t step, const AdamHyper& hyper = {});

/// Adam state (first and second moments) for a fixed list of tensors.
class Adam {
 public:
  Adam(std::vector<NamedTensor<float>> params, double learning_rate, AdamHyper hyper = {});

  /// Applies one update from the tensors' current gradients.
  void step();

  std::size_t steps_taken() const { return step_; }

 private:
  std::vector<NamedTensor<float>> params_;
  std::vector<std::vector<float>> m_, v_;
  double learning_rate_;
  AdamHyper hyper_;
  std::size_t step_ = 0;
};

}  // namespace bgcnn
