// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bgcnn::eval {

/// Per-epoch training curve point. Validation fields are absent when no
/// validation set was given (and val_auc when it holds a single class).
struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  std::optional<double> val_loss;
  std::optional<double> val_acc;
  std::optional<double> val_recall;
  std::optional<double> val_auc;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

inline constexpr std::string_view kHistoryHeader = "epoch,train_loss,train_acc,val_loss,val_acc,val_recall,val_auc";

/// CSV text: header plus one row per epoch, floats with 6 decimals, absent
/// values as empty cells.
std::string format_history(const std::vector<EpochRecord>& history);
std::vector<EpochRecord> parse_history(std::string_view csv);

void write_history(const std::vector<EpochRecord>& history, const std::string& path);
std::vector<EpochRecord> read_history(const std::string& path);

}  // namespace bgcnn::eval
