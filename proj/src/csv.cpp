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

#include "qualcode/csv.hpp"

#include "qualcode/error.hpp"
#include "qualcode/text.hpp"

namespace qualcode::csv {

std::vector<Row> parse(std::string_view data) {
  std::vector<Row> records;
  Row current;
  std::string field;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = data.size();
  bool record_open = false;

  auto end_field = [&] {
    current.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(current));
    current.clear();
    record_open = false;
  };

  while (i < n) {
    char c = data[i];
    record_open = true;
    if (c == '"' && field.empty()) {
      // Quoted field. `field.empty()` also holds for a field that has only
      // just started, which is the only place a quote may open.
      std::size_t start_line = line;
      ++i;
      bool closed = false;
      while (i < n) {
        char q = data[i];
        if (q == '"') {
          if (i + 1 < n && data[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        if (q == '\n') ++line;
        field.push_back(q);
        ++i;
      }
      if (!closed) {
        throw Error(ErrorCode::kMalformedCsv,
                    "unterminated quoted field starting on line " +
                        std::to_string(start_line));
      }
      if (i < n && data[i] != ',' && data[i] != '\n' && data[i] != '\r') {
        throw Error(ErrorCode::kMalformedCsv,
                    "unexpected character after closing quote on line " +
                        std::to_string(line));
      }
      continue;
    }
    if (c == ',') {
      end_field();
      ++i;
      continue;
    }
    if (c == '\r' && i + 1 < n && data[i + 1] == '\n') {
      end_record();
      i += 2;
      ++line;
      continue;
    }
    if (c == '\n') {
      end_record();
      ++i;
      ++line;
      continue;
    }
    if (c == '"') {
      throw Error(ErrorCode::kMalformedCsv,
                  "quote inside unquoted field on line " + std::to_string(line));
    }
    field.push_back(c);
    ++i;
  }
  if (record_open) end_record();
  return records;
}

int Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Table parse_table(std::string_view data) {
  data = text::strip_bom(data);
  std::vector<Row> records = parse(data);
  if (records.empty()) {
    throw Error(ErrorCode::kMalformedCsv, "missing header row");
  }
  Table table;
  table.header = std::move(records.front());
  for (auto& h : table.header) h = std::string(text::trim(h));
  std::size_t line = 1;
  auto newlines_in = [](const Row& r) {
    std::size_t k = 0;
    for (const auto& f : r)
      for (char c : f) k += (c == '\n');
    return k;
  };
  line += newlines_in(table.header) + 1;
  for (std::size_t r = 1; r < records.size(); ++r) {
    Row& row = records[r];
    const std::size_t this_line = line;
    line += newlines_in(row) + 1;
    // An empty physical line yields a single empty field; pad it so it reads
    // as a blank record rather than a ragged one.
    if (row.size() == 1 && row[0].empty() && table.header.size() > 1) {
      row.resize(table.header.size());
    }
    if (row.size() != table.header.size()) {
      throw Error(ErrorCode::kMalformedCsv,
                  "record on line " + std::to_string(this_line) + " has " +
                      std::to_string(row.size()) + " fields, header has " +
                      std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(row));
    table.row_lines.push_back(this_line);
  }
  return table;
}

std::string quote_field(std::string_view field, std::string_view extra) {
  bool needs = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r' ||
        extra.find(c) != std::string_view::npos) {
      needs = true;
      break;
    }
  }
  if (!needs) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void Writer::write_row(const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out_.push_back(',');
    out_ += quote_field(row[i], extra_);
  }
  out_.push_back('\n');
}

}  // namespace qualcode::csv
