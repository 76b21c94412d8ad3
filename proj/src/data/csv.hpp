// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bgcnn::data {

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t byte_offset = 0;  // offset of the row's first byte
};

/// RFC 4180 reader: comma separated, CRLF or LF line endings, double-quoted
/// fields may contain commas, newlines and "" escapes. A stray quote inside
/// an unquoted field is kept literally. Blank lines are skipped.
/// Throws ParseError (with byte offset) on an unterminated quoted field or
/// on characters after a closing quote.
std::vector<CsvRow> parse_csv(std::string_view content);

}  // namespace bgcnn::data
