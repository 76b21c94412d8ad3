// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "common/error.hpp"
#include "nn/layers.hpp"
#include "tensor/autodiff.hpp"
#include "tensor/gradcheck.hpp"

using namespace bgcnn;
using namespace bgcnn::ad;

namespace {

template <typename T>
BasicTensor<T> random_tensor(const Shape& shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  BasicTensor<T> t(shape);
  for (auto& x : t.data()) x = static_cast<T>(lo + (hi - lo) * rng.uniform());
  return t;
}

}  // namespace

TEST_CASE("rng is reproducible and forks are independent") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  Rng d(7);
  const auto before = d.next_u64();
  Rng e(7);
  Rng f1 = e.fork(1), f2 = e.fork(2);
  CHECK(e.next_u64() == before);  // forking does not advance the parent
  CHECK(f1.next_u64() != f2.next_u64());

  Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK((x >= 0.0 && x < 1.0));
    CHECK(u.below(7) < 7);
  }
}

TEST_CASE("glorot init is deterministic and bounded") {
  Rng r1(42), r2(42);
  Tensor a({30, 20}), b({30, 20});
  nn::glorot_uniform(a, 30, 20, r1);
  nn::glorot_uniform(b, 30, 20, r2);
  CHECK(a == b);
  const double limit = std::sqrt(6.0 / 50.0);
  for (float x : a.data()) CHECK(std::abs(x) <= limit);
}

TEST_CASE("matmul examples") {
  Tape<double> tape;
  auto a = tape.constant(BasicTensor<double>({2, 2}, {1, 2, 3, 4}));
  auto ones = tape.constant(BasicTensor<double>({2, 1}, {1, 1}));
  auto p = matmul(a, ones);
  CHECK(p.value().storage() == std::vector<double>{3, 7});

  auto eye = tape.constant(BasicTensor<double>({2, 2}, {1, 0, 0, 1}));
  CHECK(matmul(eye, a).value() == a.value());
  auto zero = tape.constant(BasicTensor<double>({2, 2}, 0.0));
  CHECK(matmul(zero, a).value().storage() == std::vector<double>(4, 0.0));

  auto bad = tape.constant(BasicTensor<double>({3, 1}, 1.0));
  CHECK_THROWS_AS(matmul(a, bad), ContractViolation);
}

TEST_CASE("elementwise ops") {
  Tape<float> tape;
  auto zero = tape.constant(Tensor({1}, 0.0f));
  CHECK(sigmoid(zero).value()[0] == 0.5f);
  CHECK(ad::tanh(zero).value()[0] == 0.0f);
  auto v = tape.constant(Tensor({2}, {-1.0f, 2.0f}));
  CHECK(relu(v).value().storage() == std::vector<float>{0.0f, 2.0f});
  auto w = tape.constant(Tensor({3}, 1.0f));
  CHECK_THROWS_AS(add(v, w), ContractViolation);

  auto extreme = tape.constant(Tensor({2}, {-1000.0f, 1000.0f}));
  const auto s = sigmoid(extreme).value();
  CHECK(s[0] == 0.0f);
  CHECK(s[1] == 1.0f);
}

TEST_CASE("backward basics") {
  Tensor x({3}, {1.0f, -2.0f, 0.5f});
  {
    Tape<float> tape;
    tape.backward(sum(tape.parameter(x)));
    CHECK(std::vector<float>(x.grad().begin(), x.grad().end()) == std::vector<float>{1, 1, 1});
  }
  x.zero_grad();
  {
    Tape<float> tape;
    auto v = tape.parameter(x);
    tape.backward(sum(mul(v, v)));
    CHECK(std::vector<float>(x.grad().begin(), x.grad().end()) == std::vector<float>{2.0f, -4.0f, 1.0f});
  }
  x.zero_grad();
  {
    // A tensor used twice receives both contributions.
    Tape<float> tape;
    auto v = tape.parameter(x);
    tape.backward(add(sum(v), sum(v)));
    CHECK(std::vector<float>(x.grad().begin(), x.grad().end()) == std::vector<float>{2, 2, 2});
  }
  Tape<float> tape;
  CHECK_THROWS_AS(tape.backward(tape.parameter(x)), ContractViolation);
}

TEST_CASE("non-finite values are rejected when recorded") {
  Tape<float> tape;
  auto big = tape.constant(Tensor({1}, 3e38f));
  CHECK_THROWS_AS(add(big, big), NumericError);
}

TEST_CASE("gradient_check examples") {
  Rng rng(42);
  auto x = random_tensor<double>({5}, rng);
  CHECK(gradient_check<double>([&](Tape<double>& t) { return sum(t.parameter(x)); }, x) < 1e-12);

  BasicTensor<double> ones({4}, 1.0);
  CHECK(gradient_check<double>(
            [&](Tape<double>& t) {
              auto v = t.parameter(ones);
              return sum(mul(v, v));
            },
            ones) < 1e-9);

  auto w = random_tensor<double>({3, 4}, rng);
  auto in = random_tensor<double>({2, 3}, rng);
  const double err = gradient_check<double>(
      [&](Tape<double>& t) { return sum(sigmoid(matmul(t.parameter(in), t.parameter(w)))); }, {&in, &w});
  CHECK(err < 1e-4);

  BasicTensor<double> pair({2}, 1.0);
  CHECK_THROWS_AS(gradient_check<double>([&](Tape<double>& t) { return t.parameter(pair); }, pair),
                  ContractViolation);
}

TEST_CASE("gradient_check in float32 for elementwise ops") {
  Rng rng(42);
  auto w = random_tensor<float>({3, 4}, rng);
  auto in = random_tensor<float>({2, 3}, rng);
  const double err = gradient_check<float>(
      [&](Tape<float>& t) { return sum(sigmoid(matmul(t.parameter(in), t.parameter(w)))); }, {&in, &w});
  CHECK(err < 1e-2);
}

TEST_CASE("layer forward passes stay finite on large inputs") {
  Rng rng(11);
  Tape<float> tape;
  auto x = tape.constant(random_tensor<float>({2, 5, 3}, rng, -10, 10));
  auto conv = nn::ConvParams<float>::init(3, 4, 3, rng);
  auto y = nn::conv1d_forward(x, tape.constant(conv.kernels), tape.constant(conv.bias));
  auto g1 = nn::GruParams<float>::init(4, 3, rng);
  auto g2 = nn::GruParams<float>::init(4, 3, rng);
  auto h = nn::bigru_forward(nn::maxpool1d(y, 2), nn::bind(tape, g1), nn::bind(tape, g2), false);
  auto d = nn::DenseParams<float>::init(6, 1, rng);
  auto out = nn::dense_forward(h, tape.constant(d.weight), tape.constant(d.bias), nn::Activation::Sigmoid);
  for (float v : out.value().data()) CHECK(std::isfinite(v));
}
