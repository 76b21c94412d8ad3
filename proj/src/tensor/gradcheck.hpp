// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "tensor/autodiff.hpp"

namespace bgcnn::ad {

template <typename T>
using ScalarFn = std::function<Var<T>(Tape<T>&)>;

/// Max over elements of |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
/// where numeric is the central difference (f(x+eps) - f(x-eps)) / 2eps.
///
/// `f` must bind every tensor in `inputs` with Tape::parameter; it is
/// re-evaluated on a fresh tape for each perturbation.
template <typename T>
double gradient_check(const ScalarFn<T>& f, const std::vector<BasicTensor<T>*>& inputs, T eps = T(1e-3)) {
  auto evaluate = [&f]() -> T {
    Tape<T> tape;
    Var<T> out = f(tape);
    require(out.value().size() == 1, "gradient_check: f must be scalar-valued");
    return out.value()[0];
  };

  for (auto* x : inputs) x->zero_grad();
  {
    Tape<T> tape;
    Var<T> out = f(tape);
    require(out.value().size() == 1, "gradient_check: f must be scalar-valued");
    tape.backward(out);
  }

  double worst = 0.0;
  for (auto* x : inputs) {
    std::vector<T> analytic(x->grad().begin(), x->grad().end());
    for (std::size_t i = 0; i < x->size(); ++i) {
      const T saved = (*x)[i];
      const T up = saved + eps;
      const T down = saved - eps;
      (*x)[i] = up;
      const T plus = evaluate();
      (*x)[i] = down;
      const T minus = evaluate();
      (*x)[i] = saved;
      // Divide by the step actually taken after rounding to T.
      const double step = static_cast<double>(up) - static_cast<double>(down);
      const double numeric = (static_cast<double>(plus) - static_cast<double>(minus)) / step;
      const double a = analytic[i];
      const double err = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

template <typename T>
double gradient_check(const ScalarFn<T>& f, BasicTensor<T>& x, T eps = T(1e-3)) {
  return gradient_check<T>(f, std::vector<BasicTensor<T>*>{&x}, eps);
}

}  // namespace bgcnn::ad
