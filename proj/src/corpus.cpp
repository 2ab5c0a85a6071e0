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

#include "qualcode/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "ooxml.hpp"
#include "qualcode/csv.hpp"
#include "qualcode/error.hpp"
#include "qualcode/text.hpp"

namespace qualcode {

namespace {

constexpr std::size_t kMaxSpeakerLabel = 40;

void require_utf8(std::string_view bytes, const std::string& source) {
  if (!text::is_valid_utf8(bytes)) {
    throw Error(ErrorCode::kInvalidEncoding, source + " is not valid UTF-8");
  }
}

void require_entries(const Corpus& corpus, const std::string& source) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, source + " contains no entries");
  }
}

std::optional<std::string> non_blank(std::string_view s) {
  auto t = text::trim(s);
  if (t.empty()) return std::nullopt;
  return std::string(t);
}

// Shared row-to-entry logic for CSV and XLSX.
Corpus rows_to_corpus(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows,
                      const std::vector<std::size_t>& units,
                      const ColumnSpec& columns, const std::string& source,
                      const std::string& unit_kind) {
  auto find = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::trim(header[i]) == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int text_col = find(columns.text_column);
  if (text_col < 0) {
    throw Error(ErrorCode::kMissingColumn,
                "column '" + columns.text_column + "' not found in " + source);
  }
  int speaker_col = -1;
  if (columns.speaker_column) {
    speaker_col = find(*columns.speaker_column);
    if (speaker_col < 0) {
      throw Error(ErrorCode::kMissingColumn, "column '" + *columns.speaker_column +
                                                 "' not found in " + source);
    }
  }

  Corpus corpus;
  LoadReport report;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++report.total_units;
    const std::string_view text_cell =
        static_cast<std::size_t>(text_col) < row.size() ? std::string_view(row[text_col])
                                                        : std::string_view();
    if (text::trim(text_cell).empty()) {
      ++report.skipped;
      report.skipped_units.push_back(units[r]);
      continue;
    }
    std::optional<std::string> speaker;
    if (speaker_col >= 0 && static_cast<std::size_t>(speaker_col) < row.size()) {
      speaker = non_blank(row[speaker_col]);
    }
    corpus.add(std::move(speaker), text_cell, {source, units[r], unit_kind});
    ++report.kept;
  }
  corpus.set_load_report(std::move(report));
  return corpus;
}

}  // namespace

std::string SourceLocator::to_string() const {
  if (file.empty() && unit == 0) return "-";
  return file + ":" + unit_kind + " " + std::to_string(unit);
}

std::size_t Corpus::add(std::optional<std::string> speaker, std::string_view text_in,
                        SourceLocator source) {
  auto t = text::trim(text_in);
  if (t.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "entry text must not be blank");
  }
  if (speaker) {
    auto s = text::trim(*speaker);
    if (s.empty()) {
      speaker.reset();
    } else {
      speaker = std::string(s);
      declare_role(*speaker);
    }
  }
  DataEntry e;
  e.index = entries_.size();
  e.speaker = std::move(speaker);
  e.text = std::string(t);
  e.source = std::move(source);
  entries_.push_back(std::move(e));
  return entries_.size() - 1;
}

void Corpus::declare_role(std::string role) {
  if (role.empty()) return;
  if (std::find(roles_.begin(), roles_.end(), role) == roles_.end()) {
    roles_.push_back(std::move(role));
  }
}

std::optional<std::pair<std::string, std::string>> parse_speaker_prefix(
    std::string_view unit) {
  const std::size_t colon = unit.find(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  std::string_view label = unit.substr(0, colon);
  if (label.find('\n') != std::string_view::npos ||
      label.find('\r') != std::string_view::npos) {
    return std::nullopt;
  }
  // The label must start the unit; leading whitespace means it is prose.
  if (label.front() == ' ' || label.front() == '\t') return std::nullopt;
  label = text::trim(label);
  if (label.empty() || text::utf8_length(label) > kMaxSpeakerLabel) {
    return std::nullopt;
  }
  if (colon + 1 < unit.size()) {
    const char next = unit[colon + 1];
    if (next != ' ' && next != '\t' && next != '\n' && next != '\r') {
      return std::nullopt;
    }
  }
  return std::make_pair(std::string(label),
                        std::string(text::trim(unit.substr(colon + 1))));
}

Corpus load_txt(std::string_view bytes, TxtMode mode, const std::string& source_name) {
  require_utf8(bytes, source_name);
  bytes = text::strip_bom(bytes);
  const auto lines = text::split_lines(bytes);
  Corpus corpus;
  LoadReport report;

  if (mode == TxtMode::kLinePerEntry) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
      ++report.total_units;
      if (text::trim(lines[i]).empty()) {
        ++report.skipped;
        report.skipped_units.push_back(i + 1);
        continue;
      }
      corpus.add(std::nullopt, lines[i], {source_name, i + 1, "line"});
      ++report.kept;
    }
  } else {
    struct Turn {
      std::optional<std::string> speaker;
      std::vector<std::string> parts;
      std::size_t first_line = 0;
    };
    std::vector<Turn> turns;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto line = lines[i];
      if (auto prefix = parse_speaker_prefix(line)) {
        Turn t;
        t.speaker = prefix->first;
        if (!prefix->second.empty()) t.parts.push_back(prefix->second);
        t.first_line = i + 1;
        turns.push_back(std::move(t));
        continue;
      }
      auto trimmed = text::trim(line);
      if (trimmed.empty()) continue;
      if (turns.empty()) {
        Turn t;
        t.first_line = i + 1;
        turns.push_back(std::move(t));
      }
      turns.back().parts.emplace_back(trimmed);
    }
    for (std::size_t k = 0; k < turns.size(); ++k) {
      ++report.total_units;
      const std::string body = text::join(turns[k].parts, "\n");
      if (text::trim(body).empty()) {
        ++report.skipped;
        report.skipped_units.push_back(k + 1);
        if (turns[k].speaker) corpus.declare_role(*turns[k].speaker);
        continue;
      }
      corpus.add(turns[k].speaker, body, {source_name, k + 1, "turn"});
      ++report.kept;
    }
  }
  corpus.set_load_report(std::move(report));
  require_entries(corpus, source_name);
  return corpus;
}

Corpus load_csv(std::string_view bytes, const ColumnSpec& columns,
                const std::string& source_name) {
  require_utf8(bytes, source_name);
  csv::Table table = csv::parse_table(bytes);
  Corpus corpus = rows_to_corpus(table.header, table.rows, table.row_lines, columns,
                                 source_name, "row");
  require_entries(corpus, source_name);
  return corpus;
}

Corpus load_xlsx(std::string_view bytes, const std::optional<std::string>& sheet,
                 const ColumnSpec& columns, const std::string& source_name) {
  detail::SheetRows sr = detail::xlsx_sheet(bytes, sheet);
  if (sr.rows.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, source_name + " has an empty sheet");
  }
  for (const auto& row : sr.rows) {
    for (const auto& cell : row) require_utf8(cell, source_name);
  }
  std::vector<std::string> header = sr.rows.front();
  std::vector<std::vector<std::string>> rows(sr.rows.begin() + 1, sr.rows.end());
  std::vector<std::size_t> units(sr.row_numbers.begin() + 1, sr.row_numbers.end());
  Corpus corpus = rows_to_corpus(header, rows, units, columns, source_name, "row");
  require_entries(corpus, source_name);
  return corpus;
}

Corpus load_docx(std::string_view bytes, const std::string& source_name) {
  const auto paragraphs = detail::docx_paragraphs(bytes);
  Corpus corpus;
  LoadReport report;
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    ++report.total_units;
    const std::string& p = paragraphs[i];
    require_utf8(p, source_name);
    std::optional<std::string> speaker;
    std::string body = p;
    if (auto prefix = parse_speaker_prefix(p)) {
      speaker = prefix->first;
      body = prefix->second;
    }
    if (text::trim(body).empty()) {
      ++report.skipped;
      report.skipped_units.push_back(i + 1);
      continue;
    }
    corpus.add(std::move(speaker), body, {source_name, i + 1, "paragraph"});
    ++report.kept;
  }
  corpus.set_load_report(std::move(report));
  require_entries(corpus, source_name);
  return corpus;
}

InputFormat format_from_name(std::string_view file_name) {
  std::string lower = text::to_lower(file_name);
  auto ends_with = [&](std::string_view suffix) {
    return lower.size() >= suffix.size() &&
           lower.compare(lower.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".csv")) return InputFormat::kCsv;
  if (ends_with(".xlsx")) return InputFormat::kXlsx;
  if (ends_with(".docx")) return InputFormat::kDocx;
  return InputFormat::kTxt;
}

std::optional<InputFormat> parse_input_format(std::string_view name) {
  const std::string n = text::to_lower(name);
  if (n == "auto" || n.empty()) return InputFormat::kAuto;
  if (n == "txt") return InputFormat::kTxt;
  if (n == "csv") return InputFormat::kCsv;
  if (n == "xlsx") return InputFormat::kXlsx;
  if (n == "docx" || n == "word") return InputFormat::kDocx;
  return std::nullopt;
}

Corpus load_bytes(std::string_view bytes, const std::string& source_name,
                  const LoadOptions& options) {
  InputFormat fmt = options.format;
  if (fmt == InputFormat::kAuto) fmt = format_from_name(source_name);
  switch (fmt) {
    case InputFormat::kCsv: return load_csv(bytes, options.columns, source_name);
    case InputFormat::kXlsx:
      return load_xlsx(bytes, options.sheet, options.columns, source_name);
    case InputFormat::kDocx: return load_docx(bytes, source_name);
    case InputFormat::kTxt:
    case InputFormat::kAuto: break;
  }
  return load_txt(bytes, options.txt_mode, source_name);
}

std::string to_canonical_csv(const Corpus& corpus) {
  csv::Writer w;
  w.write_row({"index", "speaker", "text"});
  for (const auto& e : corpus.entries()) {
    w.write_row({std::to_string(e.index), e.speaker.value_or(""), e.text});
  }
  return w.take();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Codebook::Codebook(std::vector<CodeLabel> labels, std::optional<int> irrelevant_id,
                   std::optional<int> other_id)
    : labels_(std::move(labels)) {
  if (labels_.empty()) {
    throw Error(ErrorCode::kInvalidCodebook, "codebook has no labels");
  }
  std::set<int> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate label id " + std::to_string(l.id));
    }
    if (text::trim(l.name).empty()) {
      throw Error(ErrorCode::kInvalidCodebook,
                  "label " + std::to_string(l.id) + " has an empty name");
    }
  }
  irrelevant_id_ = irrelevant_id.value_or(*seen.begin());
  other_id_ = other_id.value_or(*seen.rbegin());
  if (!contains(irrelevant_id_) || !contains(other_id_)) {
    throw Error(ErrorCode::kInvalidCodebook, "reserved label id not in codebook");
  }
}

bool Codebook::contains(int id) const { return find(id) != nullptr; }

const CodeLabel* Codebook::find(int id) const {
  for (const auto& l : labels_) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

const CodeLabel* Codebook::find_by_name(std::string_view name) const {
  const std::string wanted = text::normalize_label(name);
  for (const auto& l : labels_) {
    if (text::normalize_label(l.name) == wanted) return &l;
  }
  return nullptr;
}

Codebook load_codebook_csv(std::string_view bytes, std::optional<int> irrelevant_id,
                           std::optional<int> other_id) {
  require_utf8(bytes, "codebook");
  csv::Table table = csv::parse_table(bytes);
  if (table.header != csv::Row{"id", "name", "definition"}) {
    throw Error(ErrorCode::kMissingColumn,
                "codebook header must be exactly 'id,name,definition'");
  }
  std::vector<CodeLabel> labels;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (text::trim(row[0]).empty() && text::trim(row[1]).empty()) continue;
    auto id = text::parse_int(row[0]);
    if (!id || *id < 0 || *id > 1'000'000'000) {
      throw Error(ErrorCode::kNonIntegerId, "codebook line " +
                                                std::to_string(table.row_lines[r]) +
                                                ": id '" + row[0] + "'");
    }
    labels.push_back({static_cast<int>(*id), std::string(text::trim(row[1])),
                      std::string(text::trim(row[2]))});
  }
  return Codebook(std::move(labels), irrelevant_id, other_id);
}

std::string to_codebook_csv(const Codebook& codebook) {
  csv::Writer w;
  w.write_row({"id", "name", "definition"});
  for (const auto& l : codebook.labels()) {
    w.write_row({std::to_string(l.id), l.name, l.definition});
  }
  return w.take();
}

std::vector<PriorExample> load_prior_examples_csv(std::string_view bytes) {
  require_utf8(bytes, "prior examples");
  csv::Table table = csv::parse_table(bytes);
  const int text_col = table.column("text");
  const int code_col = table.column("code");
  if (text_col < 0 || code_col < 0) {
    throw Error(ErrorCode::kMissingColumn,
                "prior examples need 'text' and 'code' columns");
  }
  std::vector<PriorExample> out;
  for (const auto& row : table.rows) {
    auto t = text::trim(row[text_col]);
    auto c = text::trim(row[code_col]);
    if (t.empty() || c.empty()) continue;
    out.push_back({std::string(t), std::string(c)});
  }
  return out;
}

}  // namespace qualcode
