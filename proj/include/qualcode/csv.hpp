// Copyright 2026 The Qualcode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QUALCODE_CSV_HPP_
#define QUALCODE_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace qualcode::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader. Accepts LF or CRLF record separators, quoted fields with
// embedded separators/newlines and doubled quotes. A final line terminator
// does not produce an empty record. Throws Error(kMalformedCsv) on an
// unterminated quote or stray characters after a closing quote.
std::vector<Row> parse(std::string_view data);

// Like parse(), but requires a header row and rectangular records.
struct Table {
  Row header;
  std::vector<Row> rows;
  // 1-based physical line number where each record starts (header is line 1).
  std::vector<std::size_t> row_lines;

  // Index of the column named `name`, or -1.
  int column(std::string_view name) const;
};
Table parse_table(std::string_view data);

// Writer. Fields are quoted when they contain a comma, a double quote, CR,
// LF, or any character of `extra_quote_chars`. Lines end with LF.
class Writer {
 public:
  explicit Writer(std::string extra_quote_chars = {})
      : extra_(std::move(extra_quote_chars)) {}

  void write_row(const Row& row);
  const std::string& str() const { return out_; }
  std::string take() { return std::move(out_); }

 private:
  std::string extra_;
  std::string out_;
};

std::string quote_field(std::string_view field, std::string_view extra = {});

}  // namespace qualcode::csv

#endif  // QUALCODE_CSV_HPP_
