// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace bgcnn {

/// xoshiro256** seeded through splitmix64. All draws are defined in terms
/// of the raw 64-bit stream so a given seed reproduces bit-exactly on any
/// platform (std distributions are implementation-defined, so none are used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform in [0, 1) with 24 bits of resolution, exact in float.
  float uniform_float();

  float uniform_float(float lo, float hi) { return lo + (hi - lo) * uniform_float(); }

  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Independent stream derived from this generator's seed and a tag.
  /// Does not advance this generator.
  Rng fork(std::uint64_t tag) const;

  std::uint64_t seed() const { return seed_; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace bgcnn
