// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "text/text.hpp"

namespace bgcnn::text {

/// Token <-> id bijection. Ids 0 and 1 are reserved for padding and
/// out-of-vocabulary; real tokens occupy the dense range [2, size()).
class Vocabulary {
 public:
  static constexpr std::int32_t kPadId = 0;
  static constexpr std::int32_t kOovId = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kOovToken = "<oov>";

  Vocabulary();

  /// Appends a real token with the next id. Throws ContractViolation on
  /// duplicates or reserved names.
  std::int32_t add(const std::string& token, std::size_t frequency);

  std::size_t size() const { return id_to_token_.size(); }
  /// Id of `token`, or kOovId when unknown.
  std::int32_t id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(std::int32_t id) const;
  std::size_t frequency(std::int32_t id) const;

  /// Writes `token<TAB>id<TAB>frequency` lines sorted by id, reserved ids included.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.id_to_token_ == b.id_to_token_ && a.frequencies_ == b.frequencies_;
  }

 private:
  std::unordered_map<std::string, std::int32_t> token_to_id_;
  std::vector<std::string> id_to_token_;
  std::vector<std::size_t> frequencies_;
};

/// Keeps tokens with frequency >= min_freq, ranked by (frequency desc,
/// token asc), truncated to max_size - 2 real tokens.
Vocabulary build_vocabulary(const std::vector<Tokens>& corpus, std::size_t min_freq, std::size_t max_size);

/// Exactly max_len ids: unknown -> OOV, tail-truncated, right-padded with PAD.
std::vector<std::int32_t> encode(const Tokens& tokens, const Vocabulary& vocab, std::size_t max_len);

}  // namespace bgcnn::text
