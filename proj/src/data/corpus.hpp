// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace bgcnn::data {

/// label: 0 = not offensive, 1 = offensive.
struct RawTweet {
  std::string id;
  std::string text;
  int label = 0;

  friend bool operator==(const RawTweet&, const RawTweet&) = default;
};

enum class Split : std::uint8_t { Train, Test };

struct LabeledCorpus {
  std::vector<RawTweet> records;
  std::vector<Split> splits;  // parallel to records
  /// False when stratification was requested but a class was empty.
  bool stratified = false;

  /// Records of one split, in original order.
  std::vector<RawTweet> subset(Split which) const;
  std::size_t count(Split which) const;
};

struct ClassReport {
  std::array<std::size_t, 2> counts{};
  std::size_t total = 0;
  int majority_label = 0;
  double majority_fraction = 0.0;
};

/// Reads a CSV with a header row. `text_column` and `label_column` name the
/// required columns; an `id` column is used when present, otherwise the
/// 1-based row number becomes the id.
std::vector<RawTweet> load_csv(const std::string& path, const std::string& text_column = "tweet",
                               const std::string& label_column = "label");
std::vector<RawTweet> parse_corpus(std::string_view content, const std::string& text_column = "tweet",
                                   const std::string& label_column = "label");

/// Seeded train/test partition. Test size is round(test_fraction * N); with
/// stratification each class gets round(test_fraction * n_c), then the
/// per-class quotas are reconciled to the global total.
LabeledCorpus split(const std::vector<RawTweet>& records, double test_fraction, bool stratified, std::uint64_t seed);

ClassReport class_report(const std::vector<RawTweet>& records);

}  // namespace bgcnn::data
