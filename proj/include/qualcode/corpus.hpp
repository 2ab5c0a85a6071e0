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

#ifndef QUALCODE_CORPUS_HPP_
#define QUALCODE_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qualcode {

// Where an entry came from: file name plus the 1-based line, record,
// paragraph or turn number inside it.
struct SourceLocator {
  std::string file;
  std::size_t unit = 0;
  std::string unit_kind;  // "line", "row", "paragraph" or "turn"

  std::string to_string() const;
  friend bool operator==(const SourceLocator&, const SourceLocator&) = default;
};

struct DataEntry {
  std::size_t index = 0;
  std::optional<std::string> speaker;
  std::string text;
  SourceLocator source;
};

// Accounts for every source unit a loader looked at: kept + skipped == total.
struct LoadReport {
  std::size_t total_units = 0;
  std::size_t kept = 0;
  std::size_t skipped = 0;
  std::vector<std::size_t> skipped_units;  // 1-based unit numbers
};

// Ordered, densely indexed entries. Indices are assigned by add() and are
// always 0..size()-1; text is stored trimmed and must be non-empty.
class Corpus {
 public:
  // Appends an entry and returns its index. Throws kInvalidSpec for text that
  // is blank after trimming. A non-empty speaker is registered as a role.
  std::size_t add(std::optional<std::string> speaker, std::string_view text,
                  SourceLocator source = {});

  void declare_role(std::string role);

  const std::vector<DataEntry>& entries() const { return entries_; }
  const DataEntry& operator[](std::size_t i) const { return entries_.at(i); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Declared role labels in first-seen order.
  const std::vector<std::string>& roles() const { return roles_; }

  const std::optional<std::string>& background() const { return background_; }
  void set_background(std::optional<std::string> b) { background_ = std::move(b); }

  const LoadReport& load_report() const { return report_; }
  void set_load_report(LoadReport r) { report_ = std::move(r); }

 private:
  std::vector<DataEntry> entries_;
  std::vector<std::string> roles_;
  std::optional<std::string> background_;
  LoadReport report_;
};

enum class TxtMode { kLinePerEntry, kSpeakerTurns };

struct ColumnSpec {
  std::string text_column = "text";
  std::optional<std::string> speaker_column;
};

// Splits "Label: rest" into its parts. A label is 1..40 characters without
// ':' or a line break, and the colon must be followed by whitespace or the
// end of the unit.
std::optional<std::pair<std::string, std::string>> parse_speaker_prefix(
    std::string_view unit);

Corpus load_txt(std::string_view bytes, TxtMode mode,
                const std::string& source_name = "input.txt");

Corpus load_csv(std::string_view bytes, const ColumnSpec& columns,
                const std::string& source_name = "input.csv");

// `sheet` selects a worksheet by name; the first sheet when absent.
Corpus load_xlsx(std::string_view bytes, const std::optional<std::string>& sheet,
                 const ColumnSpec& columns,
                 const std::string& source_name = "input.xlsx");

// One entry per non-empty paragraph; the speaker prefix rule applies to each
// paragraph.
Corpus load_docx(std::string_view bytes,
                 const std::string& source_name = "input.docx");

enum class InputFormat { kAuto, kTxt, kCsv, kXlsx, kDocx };

struct LoadOptions {
  InputFormat format = InputFormat::kAuto;
  TxtMode txt_mode = TxtMode::kLinePerEntry;
  ColumnSpec columns;
  std::optional<std::string> sheet;
};

InputFormat format_from_name(std::string_view file_name);
std::optional<InputFormat> parse_input_format(std::string_view name);

// Dispatches on `options.format`, resolving kAuto from the file extension.
Corpus load_bytes(std::string_view bytes, const std::string& source_name,
                  const LoadOptions& options);

// Canonical serialization: header `index,speaker,text`, one record per entry.
// load_csv with text_column "text" and speaker_column "speaker" reads it back.
std::string to_canonical_csv(const Corpus& corpus);

std::string read_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Codebooks

struct CodeLabel {
  int id = 0;
  std::string name;
  std::string definition;
};

// Ordered labels with two reserved entries: the "irrelevant" label and the
// "relevant but not covered by other labels" label. By convention these are
// the smallest and largest ids.
class Codebook {
 public:
  Codebook() = default;
  // Throws kDuplicateId for repeated ids, kInvalidCodebook for an empty list,
  // empty names, or reserved ids that do not resolve to a label.
  explicit Codebook(std::vector<CodeLabel> labels,
                    std::optional<int> irrelevant_id = std::nullopt,
                    std::optional<int> other_id = std::nullopt);

  const std::vector<CodeLabel>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  int irrelevant_id() const { return irrelevant_id_; }
  int other_id() const { return other_id_; }

  bool contains(int id) const;
  const CodeLabel* find(int id) const;
  // Case- and whitespace-insensitive name lookup.
  const CodeLabel* find_by_name(std::string_view name) const;

 private:
  std::vector<CodeLabel> labels_;
  int irrelevant_id_ = 0;
  int other_id_ = 0;
};

// Header must be exactly `id,name,definition`.
Codebook load_codebook_csv(std::string_view bytes,
                           std::optional<int> irrelevant_id = std::nullopt,
                           std::optional<int> other_id = std::nullopt);

std::string to_codebook_csv(const Codebook& codebook);

// Already-coded exemplars given to the model as prior knowledge.
struct PriorExample {
  std::string text;
  std::string code;
  friend bool operator==(const PriorExample&, const PriorExample&) = default;
};

// Header `text,code`.
std::vector<PriorExample> load_prior_examples_csv(std::string_view bytes);

}  // namespace qualcode

#endif  // QUALCODE_CORPUS_HPP_
