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

#include "qualcode/response_parser.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <unordered_map>

#include "qualcode/error.hpp"
#include "qualcode/text.hpp"

namespace qualcode {

namespace {

bool is_delimiter_row(std::string_view line) {
  static const std::regex kDelim(R"(^\|?\s*:?-+:?\s*(\|\s*:?-+:?\s*)*\|?$)");
  return std::regex_match(line.begin(), line.end(), kDelim);
}

bool looks_like_row(std::string_view line) {
  return !line.empty() && line.find('|') != std::string_view::npos;
}

std::vector<std::string> split_cells(std::string_view line) {
  line = text::trim(line);
  if (!line.empty() && line.front() == '|') line.remove_prefix(1);
  if (!line.empty() && line.back() == '|' &&
      (line.size() < 2 || line[line.size() - 2] != '\\')) {
    line.remove_suffix(1);
  }
  std::vector<std::string> cells;
  std::string cur;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '\\' && i + 1 < line.size() && line[i + 1] == '|') {
      cur.push_back('|');
      ++i;
      continue;
    }
    if (c == '|') {
      cells.emplace_back(text::trim(cur));
      cur.clear();
      continue;
    }
    cur.push_back(c);
  }
  cells.emplace_back(text::trim(cur));
  return cells;
}

std::string header_key(std::string_view cell) {
  std::string out;
  for (char c : text::to_lower(cell)) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) out.push_back(c);
  }
  return out;
}

bool is_theme_header(const std::vector<std::string>& header) {
  if (header.size() != 4) return false;
  static const std::vector<std::set<std::string>> kAccepted = {
      {"theme", "themes"},
      {"description", "descriptions"},
      {"quote", "quotes"},
      {"participantcount", "participantcounts", "participantscount", "participantscounts",
       "participants", "count"},
  };
  for (std::size_t i = 0; i < 4; ++i) {
    if (!kAccepted[i].count(header_key(header[i]))) return false;
  }
  return true;
}

std::string escape_cell(std::string s) {
  text::replace_all(s, "\r\n", " ");
  text::replace_all(s, "\n", " ");
  text::replace_all(s, "|", "\\|");
  return s;
}

std::string strip_quote_pair(std::string_view q) {
  q = text::trim(q);
  static const std::vector<std::pair<std::string_view, std::string_view>> kPairs = {
      {"\"", "\""}, {"“", "”"}, {"”", "”"}, {"“", "“"}};
  for (const auto& [open, close] : kPairs) {
    if (q.size() >= open.size() + close.size() && q.substr(0, open.size()) == open &&
        q.substr(q.size() - close.size()) == close) {
      return std::string(q.substr(open.size(), q.size() - open.size() - close.size()));
    }
  }
  return std::string(q);
}

// Folds rows with the same normalized theme into their first occurrence.
struct Accumulator {
  std::vector<ThemeRow> rows;
  std::vector<std::vector<std::string>> descriptions;
  std::unordered_map<std::string, std::size_t> by_key;

  // Returns false when the row was folded into an existing one.
  bool add(const ThemeRow& row) {
    const std::string key = text::normalize_label(row.theme);
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      by_key.emplace(key, rows.size());
      rows.push_back(row);
      rows.back().quotes.clear();
      for (const auto& q : row.quotes) add_quote(rows.back(), q);
      descriptions.push_back({});
      if (!row.description.empty()) descriptions.back().push_back(row.description);
      return true;
    }
    ThemeRow& dst = rows[it->second];
    dst.participant_count += row.participant_count;
    for (const auto& q : row.quotes) add_quote(dst, q);
    auto& descs = descriptions[it->second];
    if (!row.description.empty() &&
        std::find(descs.begin(), descs.end(), row.description) == descs.end()) {
      descs.push_back(row.description);
    }
    return false;
  }

  static void add_quote(ThemeRow& r, const std::string& q) {
    if (std::find(r.quotes.begin(), r.quotes.end(), q) == r.quotes.end()) r.quotes.push_back(q);
  }

  std::vector<ThemeRow> finish() {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].description = text::join(descriptions[i], "; ");
    }
    return std::move(rows);
  }
};

}  // namespace

bool same_rows(const ThemeTable& a, const ThemeTable& b) { return a.rows == b.rows; }

std::vector<PipeTable> find_pipe_tables(std::string_view input) {
  const auto lines = text::split_lines(input);
  std::vector<PipeTable> tables;
  std::size_t i = 0;
  while (i + 1 < lines.size()) {
    const auto header_line = text::trim(lines[i]);
    const auto delim_line = text::trim(lines[i + 1]);
    if (!looks_like_row(header_line) || is_delimiter_row(header_line) ||
        !is_delimiter_row(delim_line)) {
      ++i;
      continue;
    }
    PipeTable t;
    t.header = split_cells(header_line);
    t.first_line = i;
    std::size_t j = i + 2;
    while (j < lines.size()) {
      const auto row = text::trim(lines[j]);
      if (!looks_like_row(row)) break;
      if (!is_delimiter_row(row)) t.rows.push_back(split_cells(row));
      ++j;
    }
    tables.push_back(std::move(t));
    i = j;
  }
  return tables;
}

std::vector<std::string> split_quotes_cell(std::string_view cell) {
  std::string s(cell);
  for (const char* br : {"<br />", "<br/>", "<br>", "<BR>"}) text::replace_all(s, br, "\n");
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    std::string q = strip_quote_pair(cur);
    if (!text::trim(q).empty()) out.push_back(std::move(q));
    cur.clear();
  };
  for (char c : s) {
    if (c == ';' || c == '\n') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

ThemeTable parse_theme_table(std::string_view input, std::size_t chunk_index) {
  const auto tables = find_pipe_tables(input);
  if (tables.empty()) throw Error(ErrorCode::kNoTableFound, "response contains no pipe table");
  const PipeTable* found = nullptr;
  for (const auto& t : tables) {
    if (is_theme_header(t.header)) {
      found = &t;
      break;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kHeaderMismatch,
                "no table with columns Theme, Description, Quotes, Participant Count (found: " +
                    text::join(tables.front().header, ", ") + ")");
  }

  ThemeTable out;
  out.provenance = {chunk_index};
  Accumulator acc;
  for (std::size_t r = 0; r < found->rows.size(); ++r) {
    const auto& cells = found->rows[r];
    if (cells.size() != 4) {
      throw Error(ErrorCode::kRowArity, "theme table row " + std::to_string(r + 1) + " has " +
                                            std::to_string(cells.size()) + " cells, expected 4");
    }
    ThemeRow row;
    row.theme = cells[0];
    if (row.theme.empty()) {
      throw Error(ErrorCode::kRowArity,
                  "theme table row " + std::to_string(r + 1) + " has an empty theme");
    }
    row.description = cells[1];
    row.quotes = split_quotes_cell(cells[2]);
    auto count = text::parse_int(cells[3]);
    if (!count) count = text::parse_leading_int(cells[3]);
    if (!count || *count < 0) {
      throw Error(ErrorCode::kBadCount, "theme '" + row.theme + "' has participant count '" +
                                            cells[3] + "'");
    }
    row.participant_count = *count;
    if (!acc.add(row)) out.warnings.push_back("theme '" + row.theme + "' repeated; rows merged");
  }
  out.rows = acc.finish();
  return out;
}

std::string render_theme_table(const ThemeTable& table) {
  std::string out = "| Theme | Description | Quotes | Participant Count |\n";
  out += "| --- | --- | --- | --- |\n";
  for (const auto& r : table.rows) {
    std::vector<std::string> quotes;
    quotes.reserve(r.quotes.size());
    for (const auto& q : r.quotes) quotes.push_back("\"" + escape_cell(q) + "\"");
    out += "| " + escape_cell(r.theme) + " | " + escape_cell(r.description) + " | " +
           text::join(quotes, "; ") + " | " + std::to_string(r.participant_count) + " |\n";
  }
  return out;
}

ThemeTable merge_theme_tables(std::span<const ThemeTable> tables, std::size_t target_n) {
  Accumulator acc;
  std::set<std::size_t> provenance;
  ThemeTable out;
  for (const auto& t : tables) {
    for (const auto& row : t.rows) acc.add(row);
    provenance.insert(t.provenance.begin(), t.provenance.end());
    out.warnings.insert(out.warnings.end(), t.warnings.begin(), t.warnings.end());
  }
  out.rows = acc.finish();
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const ThemeRow& a, const ThemeRow& b) {
    return a.participant_count > b.participant_count;
  });
  if (out.rows.size() > target_n) out.rows.resize(target_n);
  out.provenance.assign(provenance.begin(), provenance.end());
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> CodeTable::missing(std::size_t corpus_size) const {
  std::vector<bool> seen(corpus_size, false);
  for (const auto& a : assignments) {
    if (a.entry_index < corpus_size) seen[a.entry_index] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < corpus_size; ++i) {
    if (!seen[i]) out.push_back(i);
  }
  return out;
}

CodeTable parse_code_table(std::string_view input, std::size_t corpus_size,
                           const Codebook* codebook) {
  const auto tables = find_pipe_tables(input);
  const PipeTable* found = nullptr;
  for (const auto& t : tables) {
    if (t.header.size() == 2) {
      found = &t;
      break;
    }
  }
  if (!found) throw Error(ErrorCode::kNoTableFound, "response contains no two-column pipe table");

  std::map<std::size_t, std::string> by_index;
  CodeTable out;
  for (std::size_t r = 0; r < found->rows.size(); ++r) {
    const auto& cells = found->rows[r];
    if (cells.size() != 2) {
      throw Error(ErrorCode::kRowArity, "code table row " + std::to_string(r + 1) + " has " +
                                            std::to_string(cells.size()) + " cells, expected 2");
    }
    std::string_view idx_cell = text::trim(cells[0]);
    if (idx_cell.size() >= 2 && idx_cell.front() == '[' && idx_cell.back() == ']') {
      idx_cell = idx_cell.substr(1, idx_cell.size() - 2);
    }
    auto idx = text::parse_int(idx_cell);
    if (!idx || *idx < 0 || static_cast<std::size_t>(*idx) >= corpus_size) {
      throw Error(ErrorCode::kBadIndex, "code table row " + std::to_string(r + 1) +
                                            ": index '" + cells[0] + "' outside 0.." +
                                            std::to_string(corpus_size == 0 ? 0 : corpus_size - 1));
    }
    std::string code = cells[1];
    if (codebook) {
      std::optional<long long> id = text::parse_int(code);
      if (!id) {
        if (const CodeLabel* byname = codebook->find_by_name(code)) {
          id = byname->id;
        } else {
          id = text::parse_leading_int(code);
        }
      }
      if (!id || !codebook->contains(static_cast<int>(*id))) {
        throw Error(ErrorCode::kUnknownCode,
                    "entry " + std::to_string(*idx) + ": '" + code + "' is not a codebook id");
      }
      code = std::to_string(*id);
    } else if (text::trim(code).empty()) {
      out.warnings.push_back("entry " + std::to_string(*idx) + " has an empty code; skipped");
      continue;
    }
    const auto key = static_cast<std::size_t>(*idx);
    if (by_index.count(key)) {
      out.warnings.push_back("entry " + std::to_string(key) +
                             " coded more than once; keeping the last row");
    }
    by_index[key] = code;
  }
  for (auto& [i, c] : by_index) out.assignments.push_back({i, std::move(c)});
  return out;
}

CodeTable merge_code_tables(std::span<const CodeTable> tables) {
  std::map<std::size_t, std::string> by_index;
  CodeTable out;
  for (const auto& t : tables) {
    out.warnings.insert(out.warnings.end(), t.warnings.begin(), t.warnings.end());
    for (const auto& a : t.assignments) {
      if (by_index.count(a.entry_index)) {
        out.warnings.push_back("entry " + std::to_string(a.entry_index) +
                               " coded in more than one part; keeping the last");
      }
      by_index[a.entry_index] = a.code;
    }
  }
  for (auto& [i, c] : by_index) out.assignments.push_back({i, std::move(c)});
  return out;
}

std::string render_code_table(const CodeTable& table) {
  std::string out = "| Index | Code |\n| --- | --- |\n";
  for (const auto& a : table.assignments) {
    out += "| " + std::to_string(a.entry_index) + " | " + escape_cell(a.code) + " |\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

GroundingReport ground_quotes(const ThemeTable& table, const Corpus& corpus) {
  std::vector<std::string> normalized;
  normalized.reserve(corpus.size());
  for (const auto& e : corpus.entries()) normalized.push_back(text::normalize_for_match(e.text));

  GroundingReport report;
  for (const auto& row : table.rows) {
    for (const auto& q : row.quotes) {
      QuoteCheck check;
      check.theme = row.theme;
      check.quote = q;
      const std::string nq = text::normalize_for_match(q);
      if (!nq.empty()) {
        for (std::size_t i = 0; i < normalized.size(); ++i) {
          if (normalized[i].find(nq) != std::string::npos) {
            check.matched = true;
            check.matched_entry_index = corpus[i].index;
            break;
          }
        }
      }
      ++report.total;
      if (!check.matched) ++report.unmatched;
      report.checks.push_back(std::move(check));
    }
  }
  report.hallucination_rate =
      report.total == 0 ? 0.0
                        : static_cast<double>(report.unmatched) / static_cast<double>(report.total);
  return report;
}

}  // namespace qualcode
