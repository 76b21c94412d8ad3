// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "eval/metrics.hpp"

namespace bgcnn::eval {

/// Aligned plain-text table with the columns Algorithm, Average, Accuracy,
/// Precision, Recall, F1-Score (percentages, 2 decimals), one row for the
/// binary averages and one for the support-weighted ones, then AUC and the
/// confusion counts.
std::string format_table(std::string_view algorithm, const EvalReport& report);

/// Machine-readable report; metric values are fractions in [0, 1] and
/// "auc" is null when undefined.
std::string format_json(std::string_view algorithm, const EvalReport& report);

}  // namespace bgcnn::eval
