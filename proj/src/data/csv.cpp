// SPDX-License-Identifier: Apache-2.0
#include "data/csv.hpp"

#include "common/error.hpp"

namespace bgcnn::data {

std::vector<CsvRow> parse_csv(std::string_view content) {
  std::vector<CsvRow> rows;
  std::size_t i = 0;
  const std::size_t n = content.size();
  // Skip a UTF-8 byte order mark.
  if (content.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

  while (i < n) {
    if (content[i] == '\n' || content[i] == '\r') {
      ++i;
      continue;
    }
    CsvRow row;
    row.byte_offset = i;
    std::string field;
    bool row_done = false;
    while (!row_done) {
      field.clear();
      if (i < n && content[i] == '"') {
        const std::size_t quote_start = i;
        ++i;
        bool closed = false;
        while (i < n) {
          const char c = content[i];
          if (c == '"') {
            if (i + 1 < n && content[i + 1] == '"') {
              field.push_back('"');
              i += 2;
            } else {
              ++i;
              closed = true;
              break;
            }
          } else {
            field.push_back(c);
            ++i;
          }
        }
        if (!closed) throw ParseError("unterminated quoted field", quote_start);
        if (i < n && content[i] != ',' && content[i] != '\n' && content[i] != '\r')
          throw ParseError("unexpected character after closing quote", i);
      } else {
        while (i < n && content[i] != ',' && content[i] != '\n' && content[i] != '\r') field.push_back(content[i++]);
      }
      row.fields.push_back(field);
      if (i < n && content[i] == ',') {
        ++i;
      } else {
        if (i < n && content[i] == '\r') ++i;
        if (i < n && content[i] == '\n') ++i;
        row_done = true;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace bgcnn::data
