// SPDX-License-Identifier: Apache-2.0
#include "data/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "common/error.hpp"
#include "data/csv.hpp"
#include "tensor/rng.hpp"

namespace bgcnn::data {

std::vector<RawTweet> LabeledCorpus::subset(Split which) const {
  std::vector<RawTweet> out;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (splits[i] == which) out.push_back(records[i]);
  return out;
}

std::size_t LabeledCorpus::count(Split which) const {
  return static_cast<std::size_t>(std::count(splits.begin(), splits.end(), which));
}

std::vector<RawTweet> parse_corpus(std::string_view content, const std::string& text_column,
                                   const std::string& label_column) {
  std::vector<CsvRow> rows = parse_csv(content);
  if (rows.empty()) throw SchemaError("CSV has no header row");
  const auto& header = rows.front().fields;
  auto column = [&](const std::string& name) -> std::ptrdiff_t {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  const std::ptrdiff_t text_col = column(text_column);
  const std::ptrdiff_t label_col = column(label_column);
  const std::ptrdiff_t id_col = column("id");
  if (text_col < 0) throw SchemaError("missing column '" + text_column + "'");
  if (label_col < 0) throw SchemaError("missing column '" + label_column + "'");

  std::vector<RawTweet> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.fields.size() != header.size())
      throw ParseError("row " + std::to_string(r) + " has " + std::to_string(row.fields.size()) +
                           " fields, header has " + std::to_string(header.size()),
                       row.byte_offset);
    const std::string& label = row.fields[static_cast<std::size_t>(label_col)];
    if (label != "0" && label != "1")
      throw RowError("row " + std::to_string(r) + ": label '" + label + "' is not 0 or 1", r);
    RawTweet t;
    t.id = id_col >= 0 ? row.fields[static_cast<std::size_t>(id_col)] : std::to_string(r);
    t.text = row.fields[static_cast<std::size_t>(text_col)];
    t.label = label == "1" ? 1 : 0;
    records.push_back(std::move(t));
  }
  return records;
}

std::vector<RawTweet> load_csv(const std::string& path, const std::string& text_column,
                               const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open data file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str(), text_column, label_column);
}

LabeledCorpus split(const std::vector<RawTweet>& records, double test_fraction, bool stratified, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("test_fraction must be in (0, 1), got " + std::to_string(test_fraction));
  const std::size_t n = records.size();
  const auto target = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));

  std::array<std::size_t, 2> class_n{};
  for (const auto& r : records) ++class_n[static_cast<std::size_t>(r.label)];
  if (stratified && (class_n[0] == 0 || class_n[1] == 0)) stratified = false;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  LabeledCorpus out;
  out.records = records;
  out.splits.assign(n, Split::Train);
  out.stratified = stratified;

  if (!stratified) {
    for (std::size_t i = 0; i < target; ++i) out.splits[order[i]] = Split::Test;
    return out;
  }

  std::array<std::size_t, 2> quota{};
  std::array<double, 2> remainder{};
  for (std::size_t c = 0; c < 2; ++c) {
    const double exact = test_fraction * static_cast<double>(class_n[c]);
    quota[c] = static_cast<std::size_t>(std::llround(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
  }
  // Reconcile per-class rounding with the global total.
  while (quota[0] + quota[1] < target) {
    const std::size_t c = remainder[1] > remainder[0] && quota[1] < class_n[1] ? 1 : (quota[0] < class_n[0] ? 0 : 1);
    ++quota[c];
    remainder[c] -= 1.0;
  }
  while (quota[0] + quota[1] > target) {
    const std::size_t c = remainder[1] < remainder[0] && quota[1] > 0 ? 1 : (quota[0] > 0 ? 0 : 1);
    --quota[c];
    remainder[c] += 1.0;
  }

  std::array<std::size_t, 2> taken{};
  for (std::size_t idx : order) {
    const auto c = static_cast<std::size_t>(records[idx].label);
    if (taken[c] < quota[c]) {
      out.splits[idx] = Split::Test;
      ++taken[c];
    }
  }
  return out;
}

ClassReport class_report(const std::vector<RawTweet>& records) {
  require(!records.empty(), "class_report: empty corpus");
  ClassReport report;
  for (const auto& r : records) ++report.counts[static_cast<std::size_t>(r.label)];
  report.total = records.size();
  report.majority_label = report.counts[1] > report.counts[0] ? 1 : 0;
  report.majority_fraction = static_cast<double>(report.counts[static_cast<std::size_t>(report.majority_label)]) /
                             static_cast<double>(report.total);
  return report;
}

}  // namespace bgcnn::data
