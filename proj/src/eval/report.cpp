// SPDX-License-Identifier: Apache-2.0
#include "eval/report.hpp"

#include <cstdio>

#include <json.hpp>

namespace bgcnn::eval {

namespace {

std::string row(std::string_view algorithm, const char* average, double acc, double p, double r, double f1) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24.*s %-9s %9.2f %10.2f %8.2f %9.2f\n", static_cast<int>(algorithm.size()),
                algorithm.data(), average, 100.0 * acc, 100.0 * p, 100.0 * r, 100.0 * f1);
  return buf;
}

}  // namespace

std::string format_table(std::string_view algorithm, const EvalReport& report) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %-9s %9s %10s %8s %9s\n", "Algorithm", "Average", "Accuracy", "Precision",
                "Recall", "F1-Score");
  out += buf;
  out += row(algorithm, "binary", report.accuracy, report.precision, report.recall, report.f1);
  out += row(algorithm, "weighted", report.accuracy, report.weighted_precision, report.weighted_recall,
             report.weighted_f1);
  if (report.auc)
    std::snprintf(buf, sizeof buf, "AUC: %.4f\n", *report.auc);
  else
    std::snprintf(buf, sizeof buf, "AUC: n/a (evaluation set has a single class)\n");
  out += buf;
  const auto& cm = report.confusion;
  std::snprintf(buf, sizeof buf, "Confusion: TP=%zu TN=%zu FP=%zu FN=%zu\n", cm.tp, cm.tn, cm.fp, cm.fn);
  out += buf;
  return out;
}

std::string format_json(std::string_view algorithm, const EvalReport& report) {
  nlohmann::ordered_json j;
  j["algorithm"] = algorithm;
  j["accuracy"] = report.accuracy;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["weighted_precision"] = report.weighted_precision;
  j["weighted_recall"] = report.weighted_recall;
  j["weighted_f1"] = report.weighted_f1;
  j["auc"] = report.auc ? nlohmann::ordered_json(*report.auc) : nlohmann::ordered_json(nullptr);
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"tn", report.confusion.tn},
                    {"fp", report.confusion.fp},
                    {"fn", report.confusion.fn}};
  return j.dump(2) + "\n";
}

}  // namespace bgcnn::eval
