// SPDX-License-Identifier: Apache-2.0
#include "eval/history.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "data/csv.hpp"

namespace bgcnn::eval {

namespace {

void append_value(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  out += buf;
}

void append_optional(std::string& out, const std::optional<double>& v) {
  out += ',';
  if (v) append_value(out, *v);
}

double parse_double(const std::string& field, std::size_t row) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw RowError("history row " + std::to_string(row) + ": invalid number '" + field + "'", row);
  return v;
}

std::optional<double> parse_optional(const std::string& field, std::size_t row) {
  if (field.empty()) return std::nullopt;
  return parse_double(field, row);
}

}  // namespace

std::string format_history(const std::vector<EpochRecord>& history) {
  require(!history.empty(), "history is empty");
  std::string out(kHistoryHeader);
  out += '\n';
  for (const auto& r : history) {
    out += std::to_string(r.epoch);
    out += ',';
    append_value(out, r.train_loss);
    out += ',';
    append_value(out, r.train_acc);
    append_optional(out, r.val_loss);
    append_optional(out, r.val_acc);
    append_optional(out, r.val_recall);
    append_optional(out, r.val_auc);
    out += '\n';
  }
  return out;
}

std::vector<EpochRecord> parse_history(std::string_view csv) {
  auto rows = data::parse_csv(csv);
  if (rows.empty()) throw SchemaError("history file is empty");
  std::string header;
  for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
    if (i) header += ',';
    header += rows[0].fields[i];
  }
  if (header != kHistoryHeader) throw SchemaError("unexpected history header: " + header);
  std::vector<EpochRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != 7) throw ParseError("history row " + std::to_string(r) + " needs 7 fields", rows[r].byte_offset);
    EpochRecord rec;
    rec.epoch = static_cast<std::size_t>(parse_double(f[0], r));
    rec.train_loss = parse_double(f[1], r);
    rec.train_acc = parse_double(f[2], r);
    rec.val_loss = parse_optional(f[3], r);
    rec.val_acc = parse_optional(f[4], r);
    rec.val_recall = parse_optional(f[5], r);
    rec.val_auc = parse_optional(f[6], r);
    out.push_back(rec);
  }
  return out;
}

void write_history(const std::vector<EpochRecord>& history, const std::string& path) {
  const std::string text = format_history(history);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write history file: " + path);
  out << text;
  if (!out) throw IoError("failed writing history file: " + path);
}

std::vector<EpochRecord> read_history(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open history file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_history(buf.str());
}

}  // namespace bgcnn::eval
