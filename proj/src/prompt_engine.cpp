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

#include "qualcode/prompt_engine.hpp"

#include <fstream>
#include <sstream>

#include "qualcode/error.hpp"
#include "qualcode/text.hpp"

namespace qualcode {

namespace detail {
const std::map<std::string, std::string>& builtin_prompt_templates();
}  // namespace detail

std::string_view analysis_mode_name(AnalysisMode mode) {
  switch (mode) {
    case AnalysisMode::kThematic: return "thematic";
    case AnalysisMode::kInductive: return "inductive";
    case AnalysisMode::kDeductive: return "deductive";
  }
  return "thematic";
}

std::optional<AnalysisMode> parse_analysis_mode(std::string_view name) {
  const std::string n = text::to_lower(name);
  if (n == "thematic") return AnalysisMode::kThematic;
  if (n == "inductive") return AnalysisMode::kInductive;
  if (n == "deductive") return AnalysisMode::kDeductive;
  return std::nullopt;
}

std::string DataType::phrase() const {
  switch (kind) {
    case Kind::kInterview: return "interview transcripts";
    case Kind::kFocusGroup: return "a focus group discussion";
    case Kind::kSocialMediaPosts: return "social media posts";
    case Kind::kOther: return other_name.empty() ? "qualitative data" : other_name;
  }
  return "qualitative data";
}

std::string DataType::id() const {
  switch (kind) {
    case Kind::kInterview: return "interview";
    case Kind::kFocusGroup: return "focus-group";
    case Kind::kSocialMediaPosts: return "social-media";
    case Kind::kOther: return "other:" + other_name;
  }
  return "interview";
}

std::optional<DataType> DataType::parse(std::string_view id) {
  const std::string lower = text::to_lower(text::trim(id));
  if (lower == "interview" || lower == "interviews") return DataType{Kind::kInterview, {}};
  if (lower == "focus-group" || lower == "focus group" || lower == "focusgroup" ||
      lower == "focus_group") {
    return DataType{Kind::kFocusGroup, {}};
  }
  if (lower == "social-media" || lower == "social media" || lower == "social-media-posts" ||
      lower == "socialmediaposts" || lower == "social_media") {
    return DataType{Kind::kSocialMediaPosts, {}};
  }
  if (lower.rfind("other:", 0) == 0) {
    auto name = text::trim(text::trim(id).substr(6));
    if (name.empty()) return std::nullopt;
    return DataType{Kind::kOther, std::string(name)};
  }
  return std::nullopt;
}

void PromptSpec::validate() const {
  if (mode == AnalysisMode::kDeductive && !codebook) {
    throw Error(ErrorCode::kMissingCodebook, "deductive coding requires a codebook");
  }
  if (mode == AnalysisMode::kThematic && n_themes < 1) {
    throw Error(ErrorCode::kInvalidSpec, "n_themes must be at least 1");
  }
  if (mode != AnalysisMode::kDeductive && !prior_examples.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "prior examples apply to deductive coding only");
  }
  if (data_type.kind == DataType::Kind::kOther && text::trim(data_type.other_name).empty()) {
    throw Error(ErrorCode::kInvalidSpec, "custom data type needs a name");
  }
}

std::string_view fragment_kind_name(FragmentKind kind) {
  switch (kind) {
    case FragmentKind::kFixed: return "fixed";
    case FragmentKind::kDynamic: return "dynamic";
    case FragmentKind::kUserChoice: return "user-choice";
  }
  return "fixed";
}

std::vector<ChatMessage> PromptBundle::preamble_messages() const {
  std::vector<ChatMessage> out;
  std::vector<std::string> body;
  for (const auto& f : preamble) {
    if (f.id == "persona") {
      out.push_back({ChatRole::kSystem, f.text});
    } else {
      body.push_back(f.text);
    }
  }
  if (!body.empty()) out.push_back({ChatRole::kUser, text::join(body, "\n\n")});
  return out;
}

std::vector<ChatMessage> PromptBundle::standalone_messages(std::size_t k) const {
  auto out = preamble_messages();
  out.push_back({ChatRole::kUser, chunk_messages.at(k)});
  return out;
}

// ---------------------------------------------------------------------------

const PromptTemplates& PromptTemplates::builtin() {
  static const PromptTemplates kBuiltin = [] {
    PromptTemplates t;
    t.templates_ = detail::builtin_prompt_templates();
    return t;
  }();
  return kBuiltin;
}

PromptTemplates PromptTemplates::with_overrides(const std::filesystem::path& dir) {
  PromptTemplates t = builtin();
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kTemplateError, "not a directory: " + dir.string());
  }
  for (const auto& file : std::filesystem::directory_iterator(dir)) {
    if (!file.is_regular_file() || file.path().extension() != ".txt") continue;
    std::string content = read_file(file.path());
    if (!content.empty() && content.back() == '\n') content.pop_back();
    if (!content.empty() && content.back() == '\r') content.pop_back();
    t.templates_[file.path().stem().string()] = std::move(content);
  }
  return t;
}

const std::string& PromptTemplates::get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw Error(ErrorCode::kTemplateError, "no template named '" + name + "'");
  }
  return it->second;
}

std::string PromptTemplates::render(const std::string& name,
                                    const std::map<std::string, std::string>& values) const {
  const std::string& tpl = get(name);
  std::string out;
  out.reserve(tpl.size());
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '{') {
      const std::size_t close = tpl.find('}', i + 1);
      if (close != std::string::npos) {
        const std::string key = tpl.substr(i + 1, close - i - 1);
        auto it = values.find(key);
        if (it == values.end()) {
          throw Error(ErrorCode::kTemplateError,
                      "template '" + name + "' has no value for {" + key + "}");
        }
        out += it->second;
        i = close + 1;
        continue;
      }
    }
    out.push_back(tpl[i++]);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string render_chunk_payload(const Chunk& chunk, const Corpus& corpus) {
  std::string out;
  for (const auto& e : chunk.entries(corpus)) {
    if (!out.empty()) out.push_back('\n');
    out += format_payload_line(e);
  }
  return out;
}

std::string format_codebook_line(const CodeLabel& label) {
  std::string line = std::to_string(label.id) + " — " + label.name;
  if (!text::trim(label.definition).empty()) {
    line += " — " + text::collapse_whitespace(label.definition);
  }
  return line;
}

namespace {

void add(PromptBundle& b, std::string id, FragmentKind kind, std::string text) {
  b.preamble.push_back({std::move(id), kind, std::move(text)});
}

// Fragments shared by every mode, up to and including the task background.
void add_common_head(PromptBundle& b, const PromptSpec& spec, const Corpus& corpus,
                     const PromptTemplates& t) {
  if (spec.role_play) add(b, "persona", FragmentKind::kUserChoice, t.render("persona"));
  add(b, "data_type", FragmentKind::kUserChoice,
      t.render("data_type", {{"data_type", spec.data_type.phrase()}}));
  if (!text::trim(spec.background).empty()) {
    add(b, "background", FragmentKind::kDynamic,
        t.render("background", {{"background", std::string(text::trim(spec.background))}}));
  }
  if (!corpus.roles().empty()) {
    add(b, "roles", FragmentKind::kDynamic,
        t.render("roles", {{"roles", text::join(corpus.roles(), ", ")}}));
  }
}

void add_custom_instructions(PromptBundle& b, const PromptSpec& spec,
                             const PromptTemplates& t) {
  if (!text::trim(spec.custom_instructions).empty()) {
    add(b, "custom_instructions", FragmentKind::kDynamic,
        t.render("custom_instructions",
                 {{"instructions", std::string(text::trim(spec.custom_instructions))}}));
  }
}

void add_chunks(PromptBundle& b, const Corpus& corpus, std::span<const Chunk> chunks,
                const PromptTemplates& t) {
  for (const auto& c : chunks) {
    const std::string payload = render_chunk_payload(c, corpus);
    b.chunk_messages.push_back(
        t.render(c.chunk_index == 0 ? "first_chunk" : "continuation", {{"payload", payload}}));
  }
}

void require_mode(const PromptSpec& spec, AnalysisMode expected) {
  if (spec.mode != expected) {
    throw Error(ErrorCode::kSpecModeMismatch,
                "spec mode is " + std::string(analysis_mode_name(spec.mode)) +
                    ", expected " + std::string(analysis_mode_name(expected)));
  }
}

}  // namespace

PromptBundle build_thematic(const PromptSpec& spec, const Corpus& corpus,
                            std::span<const Chunk> chunks, const PromptTemplates& t) {
  require_mode(spec, AnalysisMode::kThematic);
  spec.validate();
  PromptBundle b;
  b.mode = spec.mode;
  b.schema = {OutputSchema::Kind::kThemeTable, spec.n_themes, false};
  add_common_head(b, spec, corpus, t);
  add(b, "task_description", FragmentKind::kFixed, t.render("thematic_task"));
  add(b, "processing_method", FragmentKind::kFixed, t.render("thematic_method"));
  add_custom_instructions(b, spec, t);
  add(b, "expected_output", FragmentKind::kUserChoice,
      t.render("thematic_output", {{"n_themes", std::to_string(spec.n_themes)}}));
  add_chunks(b, corpus, chunks, t);
  return b;
}

PromptBundle build_inductive(const PromptSpec& spec, const Corpus& corpus,
                             std::span<const Chunk> chunks, const PromptTemplates& t) {
  require_mode(spec, AnalysisMode::kInductive);
  spec.validate();
  PromptBundle b;
  b.mode = spec.mode;
  b.schema = {OutputSchema::Kind::kCodeTable, 0, false};
  add_common_head(b, spec, corpus, t);
  add(b, "task_description", FragmentKind::kFixed, t.render("inductive_task"));
  add(b, "processing_method", FragmentKind::kFixed, t.render("inductive_method"));
  add_custom_instructions(b, spec, t);
  add(b, "expected_output", FragmentKind::kFixed, t.render("inductive_output"));
  add_chunks(b, corpus, chunks, t);
  return b;
}

PromptBundle build_deductive(const PromptSpec& spec, const Corpus& corpus,
                             std::span<const Chunk> chunks, const PromptTemplates& t) {
  if (spec.mode == AnalysisMode::kDeductive && !spec.codebook) {
    throw Error(ErrorCode::kMissingCodebook, "deductive coding requires a codebook");
  }
  require_mode(spec, AnalysisMode::kDeductive);
  spec.validate();
  const Codebook& cb = *spec.codebook;
  PromptBundle b;
  b.mode = spec.mode;
  b.schema = {OutputSchema::Kind::kCodeTable, 0, true};
  add_common_head(b, spec, corpus, t);
  add(b, "task_description", FragmentKind::kFixed, t.render("deductive_task"));

  std::vector<std::string> lines;
  lines.reserve(cb.size());
  for (const auto& l : cb.labels()) lines.push_back(format_codebook_line(l));
  add(b, "codebook", FragmentKind::kDynamic,
      t.render("deductive_codebook", {{"labels", text::join(lines, "\n")},
                                      {"irrelevant_id", std::to_string(cb.irrelevant_id())},
                                      {"other_id", std::to_string(cb.other_id())}}));
  add(b, "processing_method", FragmentKind::kFixed, t.render("deductive_method"));

  if (!spec.prior_examples.empty()) {
    std::vector<std::string> ex;
    ex.reserve(spec.prior_examples.size());
    for (const auto& p : spec.prior_examples) {
      ex.push_back("Example: \"" + text::collapse_whitespace(p.text) + "\" → " +
                   text::collapse_whitespace(p.code));
    }
    add(b, "prior_examples", FragmentKind::kDynamic,
        t.render("deductive_examples", {{"examples", text::join(ex, "\n")}}));
  }
  add_custom_instructions(b, spec, t);
  add(b, "expected_output", FragmentKind::kFixed, t.render("deductive_output"));
  add_chunks(b, corpus, chunks, t);
  return b;
}

PromptBundle build_bundle(const PromptSpec& spec, const Corpus& corpus,
                          std::span<const Chunk> chunks, const PromptTemplates& t) {
  switch (spec.mode) {
    case AnalysisMode::kThematic: return build_thematic(spec, corpus, chunks, t);
    case AnalysisMode::kInductive: return build_inductive(spec, corpus, chunks, t);
    case AnalysisMode::kDeductive: return build_deductive(spec, corpus, chunks, t);
  }
  throw Error(ErrorCode::kInvalidSpec, "unknown mode");
}

}  // namespace qualcode
