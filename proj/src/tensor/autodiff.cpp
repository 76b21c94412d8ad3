// SPDX-License-Identifier: Apache-2.0
#include "tensor/autodiff.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <type_traits>
#include <memory>
#include <string>
#include <vector>

#include "tensor/gemm.hpp"

namespace bgcnn::ad {

// ---------------------------------------------------------------------------
// Tape

namespace {

// Exponent-bit test so the scan vectorizes: all ones means inf or NaN.
template <typename T>
bool all_finite_values(std::span<const T> values) {
  using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  constexpr Bits exponent = static_cast<Bits>(sizeof(T) == 4 ? 0x7f800000ull : 0x7ff0000000000000ull);
  Bits bad = 0;
  for (T v : values) bad |= static_cast<Bits>((std::bit_cast<Bits>(v) & exponent) == exponent);
  return bad == 0;
}

}  // namespace

template <typename T>
Var<T> Tape<T>::parameter(BasicTensor<T>& p) {
  Node node;
  node.external = &p;
  node.needs_grad = track_gradients_;
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

template <typename T>
Var<T> Tape<T>::constant(BasicTensor<T> value) {
  Node node;
  node.owned = std::move(value);
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

template <typename T>
Var<T> Tape<T>::record(BasicTensor<T> value, std::initializer_list<std::size_t> inputs, BackwardFn fn,
                       std::string_view op) {
  return record(std::move(value), std::vector<std::size_t>(inputs), std::move(fn), op);
}

template <typename T>
Var<T> Tape<T>::record(BasicTensor<T> value, const std::vector<std::size_t>& inputs, BackwardFn fn,
                       std::string_view op) {
  if (!all_finite_values<T>(value.data())) throw NumericError("non-finite value produced by " + std::string(op));
  Node node;
  node.owned = std::move(value);
  node.needs_grad = std::any_of(inputs.begin(), inputs.end(),
                                [this](std::size_t i) { return nodes_[i].needs_grad; });
  if (node.needs_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

template <typename T>
const BasicTensor<T>& Tape<T>::value(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.owned;
}

template <typename T>
std::span<T> Tape<T>::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.external) return n.external->grad();
  if (n.grad.empty()) n.grad.assign(n.owned.size(), T(0));
  return n.grad;
}

template <typename T>
void Tape<T>::backward(Var<T> loss) {
  require(loss.tape == this, "backward: variable belongs to another tape");
  require(value(loss.id).size() == 1, "backward requires a scalar loss, got shape " +
                                          shape_string(value(loss.id).shape()));
  if (!nodes_[loss.id].needs_grad) return;
  grad(loss.id)[0] += T(1);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.empty()) continue;
    n.backward(*this, i);
  }
}

// ---------------------------------------------------------------------------
// Pointwise

namespace {

enum class Broadcast { None, Left, Right };

template <typename T>
Broadcast broadcast_mode(const BasicTensor<T>& a, const BasicTensor<T>& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::None;
  if (b.size() == 1) return Broadcast::Right;
  if (a.size() == 1) return Broadcast::Left;
  throw ContractViolation(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                          shape_string(b.shape()));
}

// Applies f(x, y) with broadcasting; `df` returns (d/dx, d/dy) at (x, y).
template <typename T, typename F, typename DF>
Var<T> binary(Var<T> a, Var<T> b, const char* op, F f, DF df) {
  Tape<T>& tape = *a.tape;
  const auto& av = a.value();
  const auto& bv = b.value();
  const Broadcast mode = broadcast_mode(av, bv, op);
  BasicTensor<T> out(mode == Broadcast::Left ? bv.shape() : av.shape());
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const T x = mode == Broadcast::Left ? av[0] : av[i];
    const T y = mode == Broadcast::Right ? bv[0] : bv[i];
    out[i] = f(x, y);
  }
  const std::size_t ia = a.id, ib = b.id;
  return tape.record(
      std::move(out), {ia, ib},
      [ia, ib, mode, n, df](Tape<T>& t, std::size_t self) {
        std::vector<T> ga_local, gb_local;
        {
          auto g = t.grad(self);
          const auto& x = t.value(ia);
          const auto& y = t.value(ib);
          ga_local.assign(mode == Broadcast::Left ? 1 : n, T(0));
          gb_local.assign(mode == Broadcast::Right ? 1 : n, T(0));
          for (std::size_t i = 0; i < n; ++i) {
            const std::size_t xi = mode == Broadcast::Left ? 0 : i;
            const std::size_t yi = mode == Broadcast::Right ? 0 : i;
            auto [dx, dy] = df(x[xi], y[yi]);
            ga_local[xi] += g[i] * dx;
            gb_local[yi] += g[i] * dy;
          }
        }
        if (t.needs_grad(ia)) {
          auto ga = t.grad(ia);
          for (std::size_t i = 0; i < ga_local.size(); ++i) ga[i] += ga_local[i];
        }
        if (t.needs_grad(ib)) {
          auto gb = t.grad(ib);
          for (std::size_t i = 0; i < gb_local.size(); ++i) gb[i] += gb_local[i];
        }
      },
      op);
}

// Unary op where the derivative is expressed through the input x and output y.
template <typename T, typename F, typename DF>
Var<T> unary(Var<T> a, const char* op, F f, DF df) {
  Tape<T>& tape = *a.tape;
  const auto& av = a.value();
  BasicTensor<T> out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i]);
  const std::size_t ia = a.id;
  return tape.record(
      std::move(out), {ia},
      [ia, df](Tape<T>& t, std::size_t self) {
        auto g = t.grad(self);
        const auto& x = t.value(ia);
        const auto& y = t.value(self);
        auto ga = t.grad(ia);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * df(x[i], y[i]);
      },
      op);
}

template <typename T>
T sigmoid_scalar(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

}  // namespace

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  return binary(
      a, b, "add", [](T x, T y) { return x + y; }, [](T, T) { return std::pair<T, T>{T(1), T(1)}; });
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
  return binary(
      a, b, "sub", [](T x, T y) { return x - y; }, [](T, T) { return std::pair<T, T>{T(1), T(-1)}; });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  return binary(
      a, b, "mul", [](T x, T y) { return x * y; }, [](T x, T y) { return std::pair<T, T>{y, x}; });
}

template <typename T>
Var<T> scale(Var<T> a, T factor) {
  return unary(
      a, "scale", [factor](T x) { return x * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
Var<T> one_minus(Var<T> a) {
  return unary(
      a, "one_minus", [](T x) { return T(1) - x; }, [](T, T) { return T(-1); });
}

template <typename T>
Var<T> sigmoid(Var<T> a) {
  return unary(
      a, "sigmoid", [](T x) { return sigmoid_scalar(x); }, [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Var<T> tanh(Var<T> a) {
  return unary(
      a, "tanh", [](T x) { return std::tanh(x); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Var<T> relu(Var<T> a) {
  return unary(
      a, "relu", [](T x) { return x > T(0) ? x : T(0); }, [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

// ---------------------------------------------------------------------------
// Structural ops

template <typename T>
Var<T> add_bias(Var<T> x, Var<T> b) {
  Tape<T>& tape = *x.tape;
  const auto& xv = x.value();
  const auto& bv = b.value();
  const std::size_t n = bv.size();
  require(bv.rank() == 1 && xv.shape().back() == n,
          "add_bias: bias " + shape_string(bv.shape()) + " does not match " + shape_string(xv.shape()));
  BasicTensor<T> out(xv.shape());
  const std::size_t rows = xv.size() / n;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] = xv[r * n + j] + bv[j];
  const std::size_t ix = x.id, ib = b.id;
  return tape.record(
      std::move(out), {ix, ib},
      [ix, ib, rows, n](Tape<T>& t, std::size_t self) {
        auto g = t.grad(self);
        if (t.needs_grad(ix)) {
          auto gx = t.grad(ix);
          for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i];
        }
        if (t.needs_grad(ib)) {
          auto gb = t.grad(ib);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < n; ++j) gb[j] += g[r * n + j];
        }
      },
      "add_bias");
}

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
  Tape<T>& tape = *a.tape;
  const auto& av = a.value();
  const auto& bv = b.value();
  require(av.rank() == 2 && bv.rank() == 2 && av.dim(1) == bv.dim(0),
          "matmul: incompatible shapes " + shape_string(av.shape()) + " and " + shape_string(bv.shape()));
  const std::size_t m = av.dim(0), k = av.dim(1), n = bv.dim(1);
  BasicTensor<T> out({m, n});
  gemm_accumulate(false, false, m, n, k, av.data().data(), bv.data().data(), out.data().data());
  const std::size_t ia = a.id, ib = b.id;
  return tape.record(
      std::move(out), {ia, ib},
      [ia, ib, m, k, n](Tape<T>& t, std::size_t self) {
        const T* G = t.grad(self).data();
        // dA += G . B^T ; dB += A^T . G
        if (t.needs_grad(ia)) gemm_accumulate(false, true, m, k, n, G, t.value(ib).data().data(), t.grad(ia).data());
        if (t.needs_grad(ib)) gemm_accumulate(true, false, k, n, m, t.value(ia).data().data(), G, t.grad(ib).data());
      },
      "matmul");
}

template <typename T>
Var<T> reshape(Var<T> a, Shape shape) {
  Tape<T>& tape = *a.tape;
  const auto& av = a.value();
  require(shape_size(shape) == av.size(),
          "reshape: " + shape_string(av.shape()) + " cannot become " + shape_string(shape));
  BasicTensor<T> out(std::move(shape), std::vector<T>(av.data().begin(), av.data().end()));
  const std::size_t ia = a.id;
  return tape.record(
      std::move(out), {ia},
      [ia](Tape<T>& t, std::size_t self) {
        auto g = t.grad(self);
        auto ga = t.grad(ia);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
      },
      "reshape");
}

template <typename T>
Var<T> sum(Var<T> a) {
  Tape<T>& tape = *a.tape;
  T total = T(0);
  for (T v : a.value().data()) total += v;
  const std::size_t ia = a.id;
  return tape.record(
      BasicTensor<T>::scalar(total), {ia},
      [ia](Tape<T>& t, std::size_t self) {
        const T g = t.grad(self)[0];
        for (T& v : t.grad(ia)) v += g;
      },
      "sum");
}

template <typename T>
Var<T> embedding(std::span<const std::int32_t> ids, std::size_t batch, std::size_t len, Var<T> table) {
  Tape<T>& tape = *table.tape;
  const auto& tv = table.value();
  require(tv.rank() == 2, "embedding: table must be [V x d]");
  require(ids.size() == batch * len, "embedding: id buffer does not match batch x len");
  const std::size_t vocab = tv.dim(0), d = tv.dim(1);
  for (std::int32_t id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab)
      throw ContractViolation("embedding: id " + std::to_string(id) + " out of range for vocabulary of " +
                              std::to_string(vocab));
  }
  BasicTensor<T> out({batch, len, d});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto row = tv.data().subspan(static_cast<std::size_t>(ids[i]) * d, d);
    std::copy(row.begin(), row.end(), out.data().begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  const std::size_t it = table.id;
  std::vector<std::int32_t> saved(ids.begin(), ids.end());
  return tape.record(
      std::move(out), {it},
      [it, d, saved = std::move(saved)](Tape<T>& t, std::size_t self) {
        auto g = t.grad(self);
        auto gt = t.grad(it);
        for (std::size_t i = 0; i < saved.size(); ++i) {
          T* dst = gt.data() + static_cast<std::size_t>(saved[i]) * d;
          const T* src = g.data() + i * d;
          for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
        }
      },
      "embedding");
}

template <typename T>
Var<T> conv1d_same(Var<T> x, Var<T> kernel, Var<T> bias) {
  Tape<T>& tape = *x.tape;
  const auto& xv = x.value();
  const auto& kv = kernel.value();
  const auto& bv = bias.value();
  require(xv.rank() == 3 && kv.rank() == 3 && bv.rank() == 1, "conv1d: expected x[BxTxC], kernel[FxKxC], bias[F]");
  const std::size_t B = xv.dim(0), T_ = xv.dim(1), C = xv.dim(2);
  const std::size_t F = kv.dim(0), K = kv.dim(1);
  require(kv.dim(2) == C, "conv1d: kernel channels " + std::to_string(kv.dim(2)) +
                              " do not match input channels " + std::to_string(C));
  require(bv.dim(0) == F, "conv1d: bias length does not match filter count");
  if (K % 2 == 0) throw ConfigError("conv1d: kernel_size must be odd for same padding, got " + std::to_string(K));
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(K - 1) / 2;

  // im2col: row (b, t) holds the K input rows under the window, zero where
  // the window hangs past either end.
  const std::size_t KC = K * C, rows = B * T_;
  auto im2col = [=](const T* X) {
    std::vector<T> col(rows * KC, T(0));
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t t = 0; t < T_; ++t)
        for (std::size_t k = 0; k < K; ++k) {
          const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + k) - pad;
          if (src < 0 || src >= static_cast<std::ptrdiff_t>(T_)) continue;
          const T* xr = X + (b * T_ + static_cast<std::size_t>(src)) * C;
          std::copy(xr, xr + C, col.begin() + static_cast<std::ptrdiff_t>((b * T_ + t) * KC + k * C));
        }
    return col;
  };

  BasicTensor<T> out({B, T_, F});
  T* O = out.data().data();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t f = 0; f < F; ++f) O[r * F + f] = bv[f];
  {
    const auto col = im2col(xv.data().data());
    // out[rows x F] += col[rows x KC] . W^T, with W stored as [F x KC].
    gemm_accumulate(false, true, rows, F, KC, col.data(), kv.data().data(), O);
  }
  const std::size_t ix = x.id, ik = kernel.id, ib = bias.id;
  return tape.record(
      std::move(out), {ix, ik, ib},
      [=](Tape<T>& t, std::size_t self) {
        const T* G = t.grad(self).data();
        if (t.needs_grad(ib)) {
          T* dB = t.grad(ib).data();
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t f = 0; f < F; ++f) dB[f] += G[r * F + f];
        }
        if (t.needs_grad(ik)) {
          const auto col = im2col(t.value(ix).data().data());
          gemm_accumulate(true, false, F, KC, rows, G, col.data(), t.grad(ik).data());
        }
        if (t.needs_grad(ix)) {
          std::vector<T> dcol(rows * KC, T(0));
          gemm_accumulate(false, false, rows, KC, F, G, t.value(ik).data().data(), dcol.data());
          T* dX = t.grad(ix).data();
          for (std::size_t b = 0; b < B; ++b)
            for (std::size_t tt = 0; tt < T_; ++tt)
              for (std::size_t k = 0; k < K; ++k) {
                const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(tt + k) - pad;
                if (src < 0 || src >= static_cast<std::ptrdiff_t>(T_)) continue;
                const T* g = dcol.data() + (b * T_ + tt) * KC + k * C;
                T* dx = dX + (b * T_ + static_cast<std::size_t>(src)) * C;
                for (std::size_t c = 0; c < C; ++c) dx[c] += g[c];
              }
        }
      },
      "conv1d");
}

template <typename T>
Var<T> maxpool1d(Var<T> x, std::size_t pool) {
  Tape<T>& tape = *x.tape;
  require(pool >= 1, "maxpool1d: pool must be >= 1");
  const auto& xv = x.value();
  require(xv.rank() == 3, "maxpool1d: expected [B x T x C]");
  const std::size_t B = xv.dim(0), T_ = xv.dim(1), C = xv.dim(2);
  const std::size_t out_len = (T_ + pool - 1) / pool;
  BasicTensor<T> out({B, out_len, C});
  std::vector<std::uint32_t> argmax(out.size());
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t o = 0; o < out_len; ++o) {
      const std::size_t start = o * pool, stop = std::min(T_, start + pool);
      for (std::size_t c = 0; c < C; ++c) {
        std::size_t best = (b * T_ + start) * C + c;
        for (std::size_t t = start + 1; t < stop; ++t) {
          const std::size_t idx = (b * T_ + t) * C + c;
          if (xv[idx] > xv[best]) best = idx;
        }
        const std::size_t oi = (b * out_len + o) * C + c;
        out[oi] = xv[best];
        argmax[oi] = static_cast<std::uint32_t>(best);
      }
    }
  }
  const std::size_t ix = x.id;
  return tape.record(
      std::move(out), {ix},
      [ix, argmax = std::move(argmax)](Tape<T>& t, std::size_t self) {
        auto g = t.grad(self);
        auto gx = t.grad(ix);
        for (std::size_t i = 0; i < argmax.size(); ++i) gx[argmax[i]] += g[i];
      },
      "maxpool1d");
}

template <typename T>
Var<T> time_slice(Var<T> x, std::size_t step) {
  Tape<T>& tape = *x.tape;
  const auto& xv = x.value();
  require(xv.rank() == 3 && step < xv.dim(1), "time_slice: step out of range");
  const std::size_t B = xv.dim(0), T_ = xv.dim(1), C = xv.dim(2);
  BasicTensor<T> out({B, C});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t c = 0; c < C; ++c) out[b * C + c] = xv[(b * T_ + step) * C + c];
  const std::size_t ix = x.id;
  return tape.record(
      std::move(out), {ix},
      [ix, B, T_, C, step](Tape<T>& t, std::size_t self) {
        auto g = t.grad(self);
        auto gx = t.grad(ix);
        for (std::size_t b = 0; b < B; ++b)
          for (std::size_t c = 0; c < C; ++c) gx[(b * T_ + step) * C + c] += g[b * C + c];
      },
      "time_slice");
}

template <typename T>
Var<T> gru_recurrence(Var<T> proj_z, Var<T> proj_r, Var<T> proj_h, Var<T> u_z, Var<T> u_r, Var<T> u_h,
                      bool reverse) {
  Tape<T>& tape = *proj_z.tape;
  const auto& pz = proj_z.value();
  require(pz.rank() == 3, "gru_recurrence: projections must be [B x T x H]");
  const std::size_t B = pz.dim(0), T_ = pz.dim(1), H = pz.dim(2);
  require(proj_r.shape() == pz.shape() && proj_h.shape() == pz.shape(),
          "gru_recurrence: projections differ in shape");
  for (Var<T> u : {u_z, u_r, u_h})
    require(u.shape() == Shape{H, H}, "gru_recurrence: recurrent weights must be [H x H]");

  // Per scan step: previous state, z, r, candidate. Kept for the backward pass.
  struct Cache {
    std::vector<T> h_prev, z, r, c;
  };
  auto cache = std::make_shared<Cache>();
  const std::size_t BH = B * H, n = T_ * BH;
  cache->h_prev.assign(n, T(0));
  cache->z.resize(n);
  cache->r.resize(n);
  cache->c.resize(n);

  const T* PZ = pz.data().data();
  const T* PR = proj_r.value().data().data();
  const T* PH = proj_h.value().data().data();
  const T* UZ = u_z.value().data().data();
  const T* UR = u_r.value().data().data();
  const T* UH = u_h.value().data().data();
  BasicTensor<T> out({B, T_, H});
  T* O = out.data().data();
  std::vector<T> h(BH, T(0)), az(BH), ar(BH), ah(BH), q(BH);
  for (std::size_t s = 0; s < T_; ++s) {
    const std::size_t t = reverse ? T_ - 1 - s : s;
    T* hp = cache->h_prev.data() + s * BH;
    T* z = cache->z.data() + s * BH;
    T* r = cache->r.data() + s * BH;
    T* c = cache->c.data() + s * BH;
    std::copy(h.begin(), h.end(), hp);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t j = 0; j < H; ++j) {
        const std::size_t src = (b * T_ + t) * H + j;
        az[b * H + j] = PZ[src];
        ar[b * H + j] = PR[src];
        ah[b * H + j] = PH[src];
      }
    gemm_accumulate(false, false, B, H, H, hp, UZ, az.data());
    gemm_accumulate(false, false, B, H, H, hp, UR, ar.data());
    for (std::size_t i = 0; i < BH; ++i) {
      z[i] = sigmoid_scalar(az[i]);
      r[i] = sigmoid_scalar(ar[i]);
      q[i] = r[i] * hp[i];
    }
    gemm_accumulate(false, false, B, H, H, q.data(), UH, ah.data());
    for (std::size_t i = 0; i < BH; ++i) {
      c[i] = std::tanh(ah[i]);
      h[i] = (T(1) - z[i]) * hp[i] + z[i] * c[i];
    }
    for (std::size_t b = 0; b < B; ++b)
      std::copy(h.begin() + static_cast<std::ptrdiff_t>(b * H), h.begin() + static_cast<std::ptrdiff_t>((b + 1) * H),
                O + (b * T_ + t) * H);
  }

  const std::size_t iz = proj_z.id, ir = proj_r.id, ih = proj_h.id, iuz = u_z.id, iur = u_r.id, iuh = u_h.id;
  return tape.record(
      std::move(out), {iz, ir, ih, iuz, iur, iuh},
      [=](Tape<T>& tp, std::size_t self) {
        const T* G = tp.grad(self).data();
        const T* uz = tp.value(iuz).data().data();
        const T* ur = tp.value(iur).data().data();
        const T* uh = tp.value(iuh).data().data();
        // Scratch gradients for the projections; copied out only if needed.
        std::vector<T> dpz(T_ * BH), dpr(T_ * BH), dph(T_ * BH);
        std::vector<T> duz(H * H, T(0)), dur(H * H, T(0)), duh(H * H, T(0));
        std::vector<T> dh_next(BH, T(0)), g(BH), dz(BH), dr(BH), dq(BH), dh(BH), q(BH);
        for (std::size_t s = T_; s-- > 0;) {
          const std::size_t t = reverse ? T_ - 1 - s : s;
          const T* hp = cache->h_prev.data() + s * BH;
          const T* z = cache->z.data() + s * BH;
          const T* r = cache->r.data() + s * BH;
          const T* c = cache->c.data() + s * BH;
          T* daz = dpz.data() + s * BH;
          T* dar = dpr.data() + s * BH;
          T* dah = dph.data() + s * BH;
          for (std::size_t b = 0; b < B; ++b)
            for (std::size_t j = 0; j < H; ++j) g[b * H + j] = G[(b * T_ + t) * H + j] + dh_next[b * H + j];
          for (std::size_t i = 0; i < BH; ++i) {
            dz[i] = g[i] * (c[i] - hp[i]);
            dh[i] = g[i] * (T(1) - z[i]);
            dah[i] = g[i] * z[i] * (T(1) - c[i] * c[i]);
            daz[i] = dz[i] * z[i] * (T(1) - z[i]);
            q[i] = r[i] * hp[i];
            dq[i] = T(0);
          }
          // Candidate path through q = r * h.
          gemm_accumulate(true, false, H, H, B, q.data(), dah, duh.data());
          gemm_accumulate(false, true, B, H, H, dah, uh, dq.data());
          for (std::size_t i = 0; i < BH; ++i) {
            dr[i] = dq[i] * hp[i];
            dh[i] += dq[i] * r[i];
            dar[i] = dr[i] * r[i] * (T(1) - r[i]);
          }
          gemm_accumulate(true, false, H, H, B, hp, dar, dur.data());
          gemm_accumulate(true, false, H, H, B, hp, daz, duz.data());
          gemm_accumulate(false, true, B, H, H, dar, ur, dh.data());
          gemm_accumulate(false, true, B, H, H, daz, uz, dh.data());
          dh_next.swap(dh);
        }
        auto scatter = [&](std::size_t id, const std::vector<T>& src) {
          if (!tp.needs_grad(id)) return;
          auto dst = tp.grad(id);
          for (std::size_t s = 0; s < T_; ++s) {
            const std::size_t t = reverse ? T_ - 1 - s : s;
            for (std::size_t b = 0; b < B; ++b)
              for (std::size_t j = 0; j < H; ++j) dst[(b * T_ + t) * H + j] += src[s * BH + b * H + j];
          }
        };
        scatter(iz, dpz);
        scatter(ir, dpr);
        scatter(ih, dph);
        auto accumulate = [&](std::size_t id, const std::vector<T>& src) {
          if (!tp.needs_grad(id)) return;
          auto dst = tp.grad(id);
          for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
        };
        accumulate(iuz, duz);
        accumulate(iur, dur);
        accumulate(iuh, duh);
      },
      "gru_recurrence");
}

template <typename T>
Var<T> stack_time(const std::vector<Var<T>>& steps) {
  require(!steps.empty(), "stack_time: no steps");
  Tape<T>& tape = *steps.front().tape;
  const Shape step_shape = steps.front().shape();
  require(step_shape.size() == 2, "stack_time: steps must be [B x C]");
  const std::size_t B = step_shape[0], C = step_shape[1], T_ = steps.size();
  BasicTensor<T> out({B, T_, C});
  std::vector<std::size_t> ids;
  ids.reserve(T_);
  for (std::size_t t = 0; t < T_; ++t) {
    const auto& sv = steps[t].value();
    require(sv.shape() == step_shape, "stack_time: inconsistent step shapes");
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t c = 0; c < C; ++c) out[(b * T_ + t) * C + c] = sv[b * C + c];
    ids.push_back(steps[t].id);
  }
  return tape.record(
      std::move(out), ids,
      [ids, B, T_, C](Tape<T>& t, std::size_t self) {
        for (std::size_t s = 0; s < T_; ++s) {
          if (!t.needs_grad(ids[s])) continue;
          auto g = t.grad(self);
          auto gs = t.grad(ids[s]);
          for (std::size_t b = 0; b < B; ++b)
            for (std::size_t c = 0; c < C; ++c) gs[b * C + c] += g[(b * T_ + s) * C + c];
        }
      },
      "stack_time");
}

template <typename T>
Var<T> concat_last(Var<T> a, Var<T> b) {
  Tape<T>& tape = *a.tape;
  const auto& av = a.value();
  const auto& bv = b.value();
  require(av.rank() == bv.rank() && av.rank() >= 1, "concat_last: rank mismatch");
  Shape lead_a(av.shape().begin(), av.shape().end() - 1);
  Shape lead_b(bv.shape().begin(), bv.shape().end() - 1);
  require(lead_a == lead_b, "concat_last: leading dimensions differ: " + shape_string(av.shape()) + " vs " +
                                shape_string(bv.shape()));
  const std::size_t na = av.shape().back(), nb = bv.shape().back();
  const std::size_t rows = av.size() / na;
  Shape shape = lead_a;
  shape.push_back(na + nb);
  BasicTensor<T> out(shape);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(av.data().begin() + static_cast<std::ptrdiff_t>(r * na), na,
                out.data().begin() + static_cast<std::ptrdiff_t>(r * (na + nb)));
    std::copy_n(bv.data().begin() + static_cast<std::ptrdiff_t>(r * nb), nb,
                out.data().begin() + static_cast<std::ptrdiff_t>(r * (na + nb) + na));
  }
  const std::size_t ia = a.id, ib = b.id;
  return tape.record(
      std::move(out), {ia, ib},
      [ia, ib, rows, na, nb](Tape<T>& t, std::size_t self) {
        auto g = t.grad(self);
        if (t.needs_grad(ia)) {
          auto ga = t.grad(ia);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < na; ++j) ga[r * na + j] += g[r * (na + nb) + j];
        }
        if (t.needs_grad(ib)) {
          auto gb = t.grad(ib);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < nb; ++j) gb[r * nb + j] += g[r * (na + nb) + na + j];
        }
      },
      "concat_last");
}

template <typename T>
Var<T> apply_mask(Var<T> x, std::vector<T> mask) {
  Tape<T>& tape = *x.tape;
  const auto& xv = x.value();
  require(mask.size() == xv.size(), "apply_mask: mask size mismatch");
  BasicTensor<T> out(xv.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * mask[i];
  const std::size_t ix = x.id;
  return tape.record(
      std::move(out), {ix},
      [ix, mask = std::move(mask)](Tape<T>& t, std::size_t self) {
        auto g = t.grad(self);
        auto gx = t.grad(ix);
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i] * mask[i];
      },
      "dropout");
}

template <typename T>
Var<T> binary_cross_entropy(Var<T> p, std::span<const float> labels, T pos_weight) {
  Tape<T>& tape = *p.tape;
  const auto& pv = p.value();
  require(pv.size() == labels.size(), "binary_cross_entropy: " + std::to_string(pv.size()) +
                                          " probabilities vs " + std::to_string(labels.size()) + " labels");
  require(!labels.empty(), "binary_cross_entropy: empty batch");
  const T lo = T(kProbabilityClip), hi = T(1) - T(kProbabilityClip);
  const std::size_t n = labels.size();
  T total = T(0);
  for (std::size_t i = 0; i < n; ++i) {
    const T q = std::clamp(pv[i], lo, hi);
    const T y = T(labels[i]);
    const T w = y > T(0.5) ? pos_weight : T(1);
    total += w * (y * std::log(q) + (T(1) - y) * std::log(T(1) - q));
  }
  const T loss = -total / T(n);
  std::vector<float> saved(labels.begin(), labels.end());
  const std::size_t ip = p.id;
  return tape.record(
      BasicTensor<T>::scalar(loss), {ip},
      [ip, lo, hi, pos_weight, saved = std::move(saved)](Tape<T>& t, std::size_t self) {
        const T g = t.grad(self)[0];
        const auto& pv2 = t.value(ip);
        auto gp = t.grad(ip);
        const T inv_n = T(1) / T(saved.size());
        for (std::size_t i = 0; i < saved.size(); ++i) {
          const T q = std::clamp(pv2[i], lo, hi);
          const T y = T(saved[i]);
          const T w = y > T(0.5) ? pos_weight : T(1);
          gp[i] += -g * inv_n * w * (y / q - (T(1) - y) / (T(1) - q));
        }
      },
      "binary_cross_entropy");
}

// ---------------------------------------------------------------------------

#define BGCNN_INSTANTIATE(T)                                                                     \
  template class Tape<T>;                                                                       \
  template Var<T> add(Var<T>, Var<T>);                                                          \
  template Var<T> sub(Var<T>, Var<T>);                                                          \
  template Var<T> mul(Var<T>, Var<T>);                                                          \
  template Var<T> scale(Var<T>, T);                                                             \
  template Var<T> one_minus(Var<T>);                                                            \
  template Var<T> sigmoid(Var<T>);                                                              \
  template Var<T> tanh(Var<T>);                                                                 \
  template Var<T> relu(Var<T>);                                                                 \
  template Var<T> add_bias(Var<T>, Var<T>);                                                     \
  template Var<T> matmul(Var<T>, Var<T>);                                                       \
  template Var<T> reshape(Var<T>, Shape);                                                       \
  template Var<T> sum(Var<T>);                                                                  \
  template Var<T> embedding(std::span<const std::int32_t>, std::size_t, std::size_t, Var<T>);   \
  template Var<T> conv1d_same(Var<T>, Var<T>, Var<T>);                                          \
  template Var<T> maxpool1d(Var<T>, std::size_t);                                               \
  template Var<T> time_slice(Var<T>, std::size_t);                                              \
  template Var<T> stack_time(const std::vector<Var<T>>&);                                       \
  template Var<T> gru_recurrence(Var<T>, Var<T>, Var<T>, Var<T>, Var<T>, Var<T>, bool);           \
  template Var<T> concat_last(Var<T>, Var<T>);                                                  \
  template Var<T> apply_mask(Var<T>, std::vector<T>);                                           \
  template Var<T> binary_cross_entropy(Var<T>, std::span<const float>, T);

BGCNN_INSTANTIATE(float)
BGCNN_INSTANTIATE(double)

#undef BGCNN_INSTANTIATE

}  // namespace bgcnn::ad
