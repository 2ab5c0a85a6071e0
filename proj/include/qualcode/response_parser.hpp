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

#ifndef QUALCODE_RESPONSE_PARSER_HPP_
#define QUALCODE_RESPONSE_PARSER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qualcode/corpus.hpp"

namespace qualcode {

struct ThemeRow {
  std::string theme;
  std::string description;
  std::vector<std::string> quotes;
  long long participant_count = 0;

  friend bool operator==(const ThemeRow&, const ThemeRow&) = default;
};

struct ThemeTable {
  std::vector<ThemeRow> rows;
  std::vector<std::size_t> provenance;  // contributing chunk indices, ascending
  std::vector<std::string> warnings;
};

// Structural equality: rows only.
bool same_rows(const ThemeTable& a, const ThemeTable& b);

// A pipe table located in free text.
struct PipeTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t first_line = 0;  // 0-based line of the header
};

// Every markdown pipe table in `text`, in order. A table is a header row, a
// delimiter row (`| --- | :---: |`) and the pipe rows that follow. Cells are
// trimmed and `\|` is unescaped.
std::vector<PipeTable> find_pipe_tables(std::string_view text);

// Extracts the first pipe table whose header is Theme / Description / Quotes
// / Participant Count (case-insensitive, singular or plural). Surrounding
// prose is ignored. Throws kNoTableFound, kHeaderMismatch, kRowArity, or
// kBadCount for a count cell without a leading integer. Rows repeating a
// theme are merged into the first occurrence with a warning.
ThemeTable parse_theme_table(std::string_view text, std::size_t chunk_index = 0);

// Canonical markdown rendering; parse_theme_table reads it back exactly.
// Quotes are wrapped in double quotes and separated by "; ".
std::string render_theme_table(const ThemeTable& table);

// Splits a Quotes cell on ';', newlines and <br>, stripping one pair of
// surrounding quotation marks from each part.
std::vector<std::string> split_quotes_cell(std::string_view cell);

// Merges per-chunk tables by normalized theme name: counts summed, quotes
// concatenated without exact duplicates, distinct descriptions joined with
// "; ". The result is ordered by descending count (ties: first appearance)
// and truncated to `target_n` rows.
ThemeTable merge_theme_tables(std::span<const ThemeTable> tables, std::size_t target_n);

// ---------------------------------------------------------------------------

struct CodeAssignment {
  std::size_t entry_index = 0;
  std::string code;  // free text, or the decimal label id in codebook mode

  friend bool operator==(const CodeAssignment&, const CodeAssignment&) = default;
};

struct CodeTable {
  std::vector<CodeAssignment> assignments;  // ascending entry_index
  std::vector<std::string> warnings;

  // Entry indices in [0, corpus_size) without an assignment.
  std::vector<std::size_t> missing(std::size_t corpus_size) const;
};

// Parses the first two-column pipe table. Index cells may be written `7` or
// `[7]`. In codebook mode the code cell must carry a codebook id (a leading
// integer such as `12 (Peer advice)`) or exactly a label name. Duplicate
// indices keep the last row and add a warning. Throws kNoTableFound,
// kRowArity, kBadIndex, or kUnknownCode.
CodeTable parse_code_table(std::string_view text, std::size_t corpus_size,
                           const Codebook* codebook = nullptr);

// Concatenates per-chunk tables; later duplicates win, as within a table.
CodeTable merge_code_tables(std::span<const CodeTable> tables);

std::string render_code_table(const CodeTable& table);

// ---------------------------------------------------------------------------

struct QuoteCheck {
  std::string theme;
  std::string quote;
  bool matched = false;
  std::optional<std::size_t> matched_entry_index;
};

struct GroundingReport {
  std::vector<QuoteCheck> checks;
  std::size_t total = 0;
  std::size_t unmatched = 0;
  double hallucination_rate = 0.0;  // unmatched / total, 0 when there are no quotes
};

// A quote is grounded iff its whitespace-collapsed, case-folded form is a
// substring of some entry's normalized text; the first such entry is reported.
GroundingReport ground_quotes(const ThemeTable& table, const Corpus& corpus);

}  // namespace qualcode

#endif  // QUALCODE_RESPONSE_PARSER_HPP_
