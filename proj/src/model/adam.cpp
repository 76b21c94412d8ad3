// SPDX-License-Identifier: Apache-2.0
#include "model/adam.hpp"

#include <cmath>

#include "common/error.hpp"

namespace bgcnn {

void adam_update(std::span<float> weight, std::span<const float> grad, std::span<float> m, std::span<float> v,
                 double learning_rate, std::size_t step, const AdamHyper& hyper) {
  require(step >= 1, "adam_update: step must be >= 1");
  require(grad.size() == weight.size() && m.size() == weight.size() && v.size() == weight.size(),
          "adam_update: buffer size mismatch");
  const auto b1 = static_cast<float>(hyper.beta1);
  const auto b2 = static_cast<float>(hyper.beta2);
  const double t = static_cast<double>(step);
  // Corrections use the float-rounded betas so that at t = 1 they cancel the
  // (1 - beta) factors of the moment updates exactly.
  const auto correction1 = static_cast<float>(1.0 - std::pow(static_cast<double>(b1), t));
  const auto correction2 = static_cast<float>(1.0 - std::pow(static_cast<double>(b2), t));
  const auto lr = static_cast<float>(learning_rate);
  const auto eps = static_cast<float>(hyper.epsilon);
  for (std::size_t i = 0; i < weight.size(); ++i) {
    const float g = grad[i];
    m[i] = b1 * m[i] + (1.0f - b1) * g;
    v[i] = b2 * v[i] + (1.0f - b2) * g * g;
    const float m_hat = m[i] / correction1;
    const float v_hat = v[i] / correction2;
    weight[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

Adam::Adam(std::vector<NamedTensor<float>> params, double learning_rate, AdamHyper hyper)
    : params_(std::move(params)), learning_rate_(learning_rate), hyper_(hyper) {
  for (const auto& p : params_) {
    m_.emplace_back(p.tensor->size(), 0.0f);
    v_.emplace_back(p.tensor->size(), 0.0f);
  }
}

void Adam::step() {
  ++step_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    BasicTensor<float>& t = *params_[i].tensor;
    adam_update(t.data(), t.grad(), m_[i], v_[i], learning_rate_, step_, hyper_);
  }
}

}  // namespace bgcnn
