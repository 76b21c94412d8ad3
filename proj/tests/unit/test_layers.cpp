// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "common/error.hpp"
#include "nn/layers.hpp"
#include "tensor/gradcheck.hpp"

using namespace bgcnn;
using namespace bgcnn::ad;
using nn::Activation;

namespace {

using D = double;

BasicTensor<D> random_tensor(const Shape& shape, Rng& rng, double scale = 1.0) {
  BasicTensor<D> t(shape);
  for (auto& x : t.data()) x = scale * (2.0 * rng.uniform() - 1.0);
  return t;
}

// sum(out * probe) with a fixed random probe, so every output element has a
// distinct weight in the loss.
Var<D> probe_loss(Var<D> out, std::uint64_t seed) {
  Rng rng(seed);
  return sum(mul(out, out.tape->constant(random_tensor(out.shape(), rng))));
}

std::vector<D> to_vec(const BasicTensor<D>& t) { return {t.data().begin(), t.data().end()}; }

// Direct scalar evaluation of one GRU step for a single row.
std::vector<D> gru_oracle(const std::vector<D>& x, const std::vector<D>& h, const nn::GruParams<D>& p) {
  const std::size_t din = p.input_dim(), dh = p.hidden_dim();
  auto sig = [](D v) { return 1.0 / (1.0 + std::exp(-v)); };
  std::vector<D> z(dh), r(dh), out(dh);
  for (std::size_t j = 0; j < dh; ++j) {
    D az = p.b_z[j], ar = p.b_r[j];
    for (std::size_t i = 0; i < din; ++i) {
      az += x[i] * p.w_z.at(i, j);
      ar += x[i] * p.w_r.at(i, j);
    }
    for (std::size_t i = 0; i < dh; ++i) {
      az += h[i] * p.u_z.at(i, j);
      ar += h[i] * p.u_r.at(i, j);
    }
    z[j] = sig(az);
    r[j] = sig(ar);
  }
  for (std::size_t j = 0; j < dh; ++j) {
    D ah = p.b_h[j];
    for (std::size_t i = 0; i < din; ++i) ah += x[i] * p.w_h.at(i, j);
    for (std::size_t i = 0; i < dh; ++i) ah += r[i] * h[i] * p.u_h.at(i, j);
    out[j] = (1.0 - z[j]) * h[j] + z[j] * std::tanh(ah);
  }
  return out;
}

nn::GruParams<D> random_gru(std::size_t din, std::size_t dh, Rng& rng) {
  auto p = nn::GruParams<D>::init(din, dh, rng);
  for (auto* b : {&p.b_z, &p.b_r, &p.b_h}) *b = random_tensor({dh}, rng, 0.5);
  return p;
}

}  // namespace

TEST_CASE("embedding lookup and gradient accumulation") {
  Rng rng(1);
  auto table = random_tensor({5, 3}, rng);
  const std::vector<std::int32_t> ids = {0, 3, 3, 1};
  Tape<D> tape;
  auto out = nn::embedding_forward<D>(ids, 2, 2, tape.parameter(table));
  CHECK(out.shape() == Shape{2, 2, 3});
  for (std::size_t c = 0; c < 3; ++c) CHECK(out.value()[c] == table.at(0, c));
  tape.backward(sum(out));
  const std::vector<D> counts = {1, 1, 0, 2, 0};
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(table.grad()[r * 3 + c] == counts[r]);

  Tape<D> t2;
  const std::vector<std::int32_t> bad = {5};
  CHECK_THROWS_AS(nn::embedding_forward<D>(bad, 1, 1, t2.parameter(table)), ContractViolation);
}

TEST_CASE("conv1d examples") {
  Tape<D> tape;
  auto x = tape.constant(BasicTensor<D>({1, 4, 1}, {1, 2, 3, 4}));
  auto none = tape.constant(BasicTensor<D>({1}, 0.0));
  auto identity = tape.constant(BasicTensor<D>({1, 3, 1}, {0, 1, 0}));
  CHECK(to_vec(nn::conv1d_forward(x, identity, none).value()) == std::vector<D>{1, 2, 3, 4});

  auto diff = tape.constant(BasicTensor<D>({1, 3, 1}, {1, 0, -1}));
  CHECK(to_vec(conv1d_same(x, diff, none).value()) == std::vector<D>{-2, -2, -2, 3});
  CHECK(to_vec(nn::conv1d_forward(x, diff, none).value()) == std::vector<D>{0, 0, 0, 3});

  auto zeros = tape.constant(BasicTensor<D>({1, 3, 2}, 0.0));
  auto k2 = tape.constant(BasicTensor<D>({2, 3, 2}, 0.7));
  auto b2 = tape.constant(BasicTensor<D>({2}, {0.25, -0.5}));
  CHECK(to_vec(nn::conv1d_forward(zeros, k2, b2).value()) == std::vector<D>{0.25, 0, 0.25, 0, 0.25, 0});

  Rng rng(3);
  CHECK_THROWS_AS(nn::ConvParams<D>::init(2, 2, 4, rng), ConfigError);
  auto even = tape.constant(BasicTensor<D>({1, 2, 1}, 1.0));
  CHECK_THROWS_AS(nn::conv1d_forward(x, even, none), ConfigError);
}

TEST_CASE("maxpool examples") {
  Tape<D> tape;
  BasicTensor<D> raw({1, 4, 1}, {1, 3, 2, 5});
  auto x = tape.parameter(raw);
  CHECK(nn::maxpool1d(x, 1).value() == raw);
  CHECK(to_vec(nn::maxpool1d(x, 2).value()) == std::vector<D>{3, 5});
  CHECK(nn::maxpool1d(x, 3).shape() == Shape{1, 2, 1});

  BasicTensor<D> tie({1, 2, 1}, {2, 2});
  Tape<D> t2;
  t2.backward(sum(nn::maxpool1d(t2.parameter(tie), 2)));
  CHECK(tie.grad()[0] == 1.0);
  CHECK(tie.grad()[1] == 0.0);

  Rng rng(9);
  auto big = random_tensor({2, 7, 3}, rng);
  Tape<D> t3;
  auto pooled = nn::maxpool1d(t3.parameter(big), 2);
  t3.backward(probe_loss(pooled, 4));
  std::size_t nonzero = 0;
  for (D g : big.grad()) nonzero += g != 0.0;
  CHECK(nonzero <= pooled.value().size());
}

TEST_CASE("gru_step zero parameters") {
  Rng rng(0);
  auto p = nn::GruParams<D>::init(2, 3, rng);
  for (auto* t : {&p.w_z, &p.w_r, &p.w_h, &p.u_z, &p.u_r, &p.u_h}) t->fill(0.0);
  Tape<D> tape;
  auto vars = nn::bind(tape, p);
  auto x = tape.constant(BasicTensor<D>({1, 2}, {0.3, -0.7}));
  auto h0 = tape.constant(BasicTensor<D>({1, 3}, 0.0));
  CHECK(to_vec(nn::gru_step(x, h0, vars).value()) == std::vector<D>{0, 0, 0});
  auto v = tape.constant(BasicTensor<D>({1, 3}, {1.0, -2.0, 4.0}));
  CHECK(to_vec(nn::gru_step(x, v, vars).value()) == std::vector<D>{0.5, -1.0, 2.0});
}

TEST_CASE("gru_step matches the scalar oracle") {
  Rng rng(7);
  auto p = random_gru(2, 2, rng);
  const std::vector<D> x = {0.4, -1.1}, h = {0.2, 0.9};
  Tape<D> tape;
  auto out = nn::gru_step(tape.constant(BasicTensor<D>({1, 2}, x)), tape.constant(BasicTensor<D>({1, 2}, h)),
                          nn::bind(tape, p));
  const auto expect = gru_oracle(x, h, p);
  for (std::size_t j = 0; j < 2; ++j) CHECK(out.value()[j] == doctest::Approx(expect[j]).epsilon(1e-12));
}

TEST_CASE("bigru against unrolled oracle and reversal") {
  Rng rng(5);
  const std::size_t T = 3, din = 2, dh = 3;
  auto fwd = random_gru(din, dh, rng);
  auto bwd = random_gru(din, dh, rng);
  auto xs = random_tensor({1, T, din}, rng);

  Tape<D> tape;
  auto x = tape.constant(xs);
  auto seq = nn::bigru_forward(x, nn::bind(tape, fwd), nn::bind(tape, bwd), true);
  CHECK(seq.shape() == Shape{1, T, 2 * dh});
  auto last = nn::bigru_forward(x, nn::bind(tape, fwd), nn::bind(tape, bwd), false);
  CHECK(last.shape() == Shape{1, 2 * dh});

  std::vector<std::vector<D>> hf(T), hb(T);
  std::vector<D> h(dh, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    h = gru_oracle({xs.data()[t * din], xs.data()[t * din + 1]}, h, fwd);
    hf[t] = h;
  }
  h.assign(dh, 0.0);
  for (std::size_t t = T; t-- > 0;) {
    h = gru_oracle({xs.data()[t * din], xs.data()[t * din + 1]}, h, bwd);
    hb[t] = h;
  }
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < dh; ++j) {
      CHECK(seq.value()[t * 2 * dh + j] == doctest::Approx(hf[t][j]).epsilon(1e-12));
      CHECK(seq.value()[t * 2 * dh + dh + j] == doctest::Approx(hb[t][j]).epsilon(1e-12));
    }
  for (std::size_t j = 0; j < dh; ++j) {
    CHECK(last.value()[j] == doctest::Approx(hf[T - 1][j]).epsilon(1e-12));
    CHECK(last.value()[dh + j] == doctest::Approx(hb[0][j]).epsilon(1e-12));
  }

  // Backward direction == forward scan of the reversed sequence, re-reversed, bit for bit.
  BasicTensor<D> rev({1, T, din});
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t c = 0; c < din; ++c) rev.data()[t * din + c] = xs.data()[(T - 1 - t) * din + c];
  auto states = nn::gru_scan(tape.constant(rev), nn::bind(tape, bwd), false);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < dh; ++j)
      CHECK(seq.value()[t * 2 * dh + dh + j] == states.value()[(T - 1 - t) * dh + j]);
}

TEST_CASE("bigru length one sees the same step in both directions") {
  Rng rng(6);
  auto fwd = random_gru(2, 2, rng);
  auto bwd = random_gru(2, 2, rng);
  auto xs = random_tensor({1, 1, 2}, rng);
  Tape<D> tape;
  auto out = nn::bigru_forward(tape.constant(xs), nn::bind(tape, fwd), nn::bind(tape, bwd), false);
  const std::vector<D> x = {xs[0], xs[1]}, zero = {0, 0};
  const auto f = gru_oracle(x, zero, fwd), b = gru_oracle(x, zero, bwd);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(out.value()[j] == doctest::Approx(f[j]).epsilon(1e-12));
    CHECK(out.value()[2 + j] == doctest::Approx(b[j]).epsilon(1e-12));
  }
}

TEST_CASE("dense examples") {
  Tape<D> tape;
  auto x = tape.constant(BasicTensor<D>({1, 2}, {1, 1}));
  auto w = tape.constant(BasicTensor<D>({2, 1}, {1, 2}));
  auto b = tape.constant(BasicTensor<D>({1}, 0.5));
  CHECK(nn::dense_forward(x, w, b, Activation::None).value()[0] == 3.5);

  auto eye = tape.constant(BasicTensor<D>({2, 2}, {1, 0, 0, 1}));
  auto zero2 = tape.constant(BasicTensor<D>({2}, 0.0));
  auto v = tape.constant(BasicTensor<D>({1, 2}, {-0.25, 7}));
  CHECK(nn::dense_forward(v, eye, zero2, Activation::None).value() == v.value());

  auto zw = tape.constant(BasicTensor<D>({2, 1}, 0.0));
  auto zb = tape.constant(BasicTensor<D>({1}, 0.0));
  CHECK(nn::dense_forward(v, zw, zb, Activation::Sigmoid).value()[0] == 0.5);
  CHECK_THROWS_AS(nn::dense_forward(v, tape.constant(BasicTensor<D>({3, 1}, 0.0)), zb, Activation::None),
                  ContractViolation);
}

TEST_CASE("dropout") {
  Rng rng(42);
  Tape<float> tape;
  Tensor raw({100000});
  for (auto& x : raw.data()) x = rng.uniform_float(0.5f, 1.5f);
  auto x = tape.constant(raw);
  CHECK(nn::dropout(x, 0.5, false, rng).value() == raw);
  CHECK(nn::dropout(x, 0.0, true, rng).value() == raw);
  CHECK_THROWS_AS(nn::dropout(x, 1.0, true, rng), ConfigError);
  CHECK_THROWS_AS(nn::dropout(x, -0.1, true, rng), ConfigError);

  const auto y = nn::dropout(x, 0.5, true, rng).value();
  double zeros = 0, in_sum = 0, out_sum = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    zeros += y[i] == 0.0f;
    in_sum += raw[i];
    out_sum += y[i];
  }
  CHECK(zeros / raw.size() == doctest::Approx(0.5).epsilon(0.02));
  CHECK(out_sum / in_sum == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("layer gradients match central differences") {
  Rng rng(42);
  SUBCASE("embedding") {
    auto table = random_tensor({6, 3}, rng);
    const std::vector<std::int32_t> ids = {1, 4, 4, 0, 5, 2};
    const double err = gradient_check<D>(
        [&](Tape<D>& t) { return probe_loss(nn::embedding_forward<D>(ids, 2, 3, t.parameter(table)), 1); }, table);
    CHECK(err < 1e-4);
  }
  SUBCASE("conv1d") {
    auto x = random_tensor({2, 5, 3}, rng);
    auto p = nn::ConvParams<D>::init(3, 4, 3, rng);
    p.bias = random_tensor({4}, rng, 0.1);
    const double err = gradient_check<D>(
        [&](Tape<D>& t) {
          return probe_loss(
              nn::conv1d_forward(t.parameter(x), t.parameter(p.kernels), t.parameter(p.bias)), 2);
        },
        {&x, &p.kernels, &p.bias});
    CHECK(err < 1e-4);
  }
  SUBCASE("maxpool") {
    auto x = random_tensor({2, 5, 3}, rng);
    const double err =
        gradient_check<D>([&](Tape<D>& t) { return probe_loss(nn::maxpool1d(t.parameter(x), 2), 3); }, x);
    CHECK(err < 1e-4);
  }
  SUBCASE("gru_step") {
    auto p = random_gru(3, 4, rng);
    auto x = random_tensor({2, 3}, rng);
    auto h = random_tensor({2, 4}, rng);
    std::vector<BasicTensor<D>*> inputs = {&x, &h};
    std::vector<NamedTensor<D>> named;
    p.append_tensors("g", named);
    for (auto& n : named) inputs.push_back(n.tensor);
    const double err = gradient_check<D>(
        [&](Tape<D>& t) { return probe_loss(nn::gru_step(t.parameter(x), t.parameter(h), nn::bind(t, p)), 4); },
        inputs);
    CHECK(err < 1e-4);
  }
  SUBCASE("bigru") {
    auto fwd = random_gru(2, 3, rng);
    auto bwd = random_gru(2, 3, rng);
    auto x = random_tensor({2, 4, 2}, rng);
    std::vector<BasicTensor<D>*> inputs = {&x};
    std::vector<NamedTensor<D>> named;
    fwd.append_tensors("f", named);
    bwd.append_tensors("b", named);
    for (auto& n : named) inputs.push_back(n.tensor);
    for (bool seq : {true, false}) {
      const double err = gradient_check<D>(
          [&](Tape<D>& t) {
            return probe_loss(nn::bigru_forward(t.parameter(x), nn::bind(t, fwd), nn::bind(t, bwd), seq), 5);
          },
          inputs);
      CHECK(err < 1e-4);
    }
  }
  SUBCASE("dense") {
    auto x = random_tensor({3, 4}, rng);
    auto p = nn::DenseParams<D>::init(4, 2, rng);
    p.bias = random_tensor({2}, rng, 0.1);
    for (auto act : {Activation::None, Activation::Relu, Activation::Sigmoid}) {
      const double err = gradient_check<D>(
          [&](Tape<D>& t) {
            return probe_loss(nn::dense_forward(t.parameter(x), t.parameter(p.weight), t.parameter(p.bias), act), 6);
          },
          {&x, &p.weight, &p.bias});
      CHECK(err < 1e-4);
    }
  }
}
