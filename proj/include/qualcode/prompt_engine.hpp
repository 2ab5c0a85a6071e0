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

#ifndef QUALCODE_PROMPT_ENGINE_HPP_
#define QUALCODE_PROMPT_ENGINE_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qualcode/chat.hpp"
#include "qualcode/chunker.hpp"
#include "qualcode/corpus.hpp"

namespace qualcode {

enum class AnalysisMode { kThematic, kInductive, kDeductive };

std::string_view analysis_mode_name(AnalysisMode mode);
std::optional<AnalysisMode> parse_analysis_mode(std::string_view name);

struct DataType {
  enum class Kind { kInterview, kFocusGroup, kSocialMediaPosts, kOther };
  Kind kind = Kind::kInterview;
  std::string other_name;  // only for kOther

  // Phrase used inside the data-type sentence, e.g. "a focus group discussion".
  std::string phrase() const;
  // Stable identifier: interview, focus-group, social-media, other:<name>.
  std::string id() const;
  static std::optional<DataType> parse(std::string_view id);

  friend bool operator==(const DataType&, const DataType&) = default;
};

struct PromptSpec {
  AnalysisMode mode = AnalysisMode::kThematic;
  DataType data_type;
  bool role_play = false;
  int n_themes = 10;  // thematic only
  std::string background;
  std::string custom_instructions;
  std::optional<Codebook> codebook;          // required iff deductive
  std::vector<PriorExample> prior_examples;  // deductive only

  // Throws kMissingCodebook for deductive without a codebook, kInvalidSpec
  // for n_themes < 1 or prior examples outside deductive mode.
  void validate() const;
};

// How a fragment of the preamble is produced: fixed template text, dynamic
// text filled from user input or the data, or text selected by a user
// toggle/option.
enum class FragmentKind { kFixed, kDynamic, kUserChoice };
std::string_view fragment_kind_name(FragmentKind kind);

struct PromptFragment {
  std::string id;
  FragmentKind kind = FragmentKind::kFixed;
  std::string text;
};

struct OutputSchema {
  enum class Kind { kThemeTable, kCodeTable };
  Kind kind = Kind::kThemeTable;
  int n_themes = 0;         // theme table
  bool codebook_ids = false;  // code table restricted to codebook ids
};

struct PromptBundle {
  AnalysisMode mode = AnalysisMode::kThematic;
  std::vector<PromptFragment> preamble;
  std::vector<std::string> chunk_messages;
  OutputSchema schema;

  // Persona (when present) as the system message, the remaining fragments
  // joined by blank lines as one user message.
  std::vector<ChatMessage> preamble_messages() const;

  // Preamble plus chunk `k`, without earlier turns. Used when chunks are
  // processed independently.
  std::vector<ChatMessage> standalone_messages(std::size_t k) const;
};

// Named `{placeholder}` templates. The built-in set is compiled in from
// resources/prompts; a directory of same-named .txt files overrides it.
class PromptTemplates {
 public:
  static const PromptTemplates& builtin();
  // Starts from the built-in set and replaces every template found in `dir`.
  static PromptTemplates with_overrides(const std::filesystem::path& dir);

  const std::string& get(const std::string& name) const;

  // Substitutes `{key}` occurrences in one pass; replacement text is not
  // rescanned. Throws kTemplateError for a placeholder without a value.
  std::string render(const std::string& name,
                     const std::map<std::string, std::string>& values = {}) const;

  const std::map<std::string, std::string>& all() const { return templates_; }

 private:
  std::map<std::string, std::string> templates_;
};

// One line per entry, `[index] (speaker) text`.
std::string render_chunk_payload(const Chunk& chunk, const Corpus& corpus);

PromptBundle build_thematic(const PromptSpec& spec, const Corpus& corpus,
                            std::span<const Chunk> chunks,
                            const PromptTemplates& templates = PromptTemplates::builtin());
PromptBundle build_inductive(const PromptSpec& spec, const Corpus& corpus,
                             std::span<const Chunk> chunks,
                             const PromptTemplates& templates = PromptTemplates::builtin());
PromptBundle build_deductive(const PromptSpec& spec, const Corpus& corpus,
                             std::span<const Chunk> chunks,
                             const PromptTemplates& templates = PromptTemplates::builtin());

// Dispatches on spec.mode.
PromptBundle build_bundle(const PromptSpec& spec, const Corpus& corpus,
                          std::span<const Chunk> chunks,
                          const PromptTemplates& templates = PromptTemplates::builtin());

// `id — name — definition`, or `id — name` without a definition.
std::string format_codebook_line(const CodeLabel& label);

}  // namespace qualcode

#endif  // QUALCODE_PROMPT_ENGINE_HPP_
