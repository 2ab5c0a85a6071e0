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

#ifndef QUALCODE_SESSION_HPP_
#define QUALCODE_SESSION_HPP_

#include <array>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qualcode/agreement.hpp"
#include "qualcode/chunker.hpp"
#include "qualcode/corpus.hpp"
#include "qualcode/llm_client.hpp"
#include "qualcode/prompt_engine.hpp"
#include "qualcode/response_parser.hpp"

namespace qualcode {

enum class Stage { kIngest, kChunk, kPrompt, kLlm, kParse, kExport };
inline constexpr std::size_t kStageCount = 6;
std::string_view stage_name(Stage stage);

struct StageTimings {
  // Unset until the stage completes; completed stages are at least 1ns.
  std::array<std::optional<std::chrono::nanoseconds>, kStageCount> stages;
  // From the start of the first recorded stage to the end of the last one.
  std::chrono::nanoseconds total{0};
  std::optional<std::chrono::steady_clock::time_point> origin;

  std::optional<std::chrono::nanoseconds> get(Stage s) const {
    return stages[static_cast<std::size_t>(s)];
  }
  std::chrono::nanoseconds sum() const;
};

struct StageError {
  Stage stage = Stage::kIngest;
  std::string code;  // error code name, e.g. "MissingColumn" or "ClientError"
  std::optional<ErrorCategory> category;
  std::optional<std::size_t> chunk_index;
  int attempts = 0;
  std::string message;
};

using Result = std::variant<std::monostate, ThemeTable, CodeTable>;

struct Session {
  std::string id;
  std::chrono::system_clock::time_point created_at;
  std::string source_name;
  std::optional<Corpus> corpus;
  PromptSpec spec;
  ProviderConfig provider_config;
  std::string provider_name;
  TokenBudget budget;
  std::vector<Chunk> chunks;
  std::optional<PromptBundle> bundle;
  Transcript transcript;
  Result result;
  std::optional<GroundingReport> grounding;
  StageTimings timings;
  std::optional<StageError> error;
  std::vector<std::string> notes;  // free-form settings echoed into the log, e.g. "seed=7"

  bool has_result() const { return !std::holds_alternative<std::monostate>(result); }
  const ThemeTable* themes() const { return std::get_if<ThemeTable>(&result); }
  const CodeTable* codes() const { return std::get_if<CodeTable>(&result); }
  bool failed() const { return error.has_value(); }
};

// Opaque token, unique within the process.
std::string new_session_id();

Session make_session(PromptSpec spec, ProviderConfig provider_config, TokenBudget budget = {});

// Loads the corpus and records the ingest timing. On failure the error is
// attached to the session (stage ingest) and false is returned.
bool ingest(Session& session, std::string_view bytes, const std::string& source_name,
            const LoadOptions& options);
// Uses an already loaded corpus.
void set_corpus(Session& session, Corpus corpus, const std::string& source_name = "corpus");

struct RunOptions {
  ProgressFn on_progress;
  // Send each chunk with only the preamble (code tables only).
  bool independent_chunks = false;
  const PromptTemplates* templates = nullptr;  // built-in set when null
};

// chunk -> prompt -> llm -> parse/merge, plus quote grounding for thematic
// runs. Never throws for pipeline failures: the first error is attached to
// the session with the failing stage and the run stops there.
bool run(Session& session, const LlmClient& client, const RunOptions& options = {});

struct RunSet {
  std::vector<Session> runs;
  // Code-table runs only, when every run succeeded: per-entry labels
  // compared across runs. Uncoded entries count as the label "<missing>".
  std::optional<AgreementResult> fleiss;
  std::optional<Consensus> consensus;
  std::optional<std::string> agreement_error;
};

// n independent copies of `prototype` (which must have a corpus). Runs are
// concurrent when the provider supports it. Throws kPrecondition for n < 2.
RunSet run_repeated(const Session& prototype, const LlmClient& client, std::size_t n,
                    const RunOptions& options = {}, TiePolicy ties = TiePolicy::kFirstRun);

// Per-entry labels of a code table; entries without a code get "<missing>".
std::vector<Label> label_vector(const CodeTable& table, std::size_t corpus_size);

struct ExportOptions {
  std::string quote_delimiter = " | ";
};

// Thematic: `Theme,Description,Quotes,ParticipantCount`; codes: `Index,Code`.
// Throws kNoResult when the result is absent.
std::string export_csv(const Result& result, const ExportOptions& options = {});
// export_csv for the session, recording the export timing.
std::string export_results(Session& session, const ExportOptions& options = {});
// Consensus labels as `Index,Code`; unresolved entries are left blank.
std::string export_consensus_csv(const Consensus& consensus);

struct LogOptions {
  // Zero timestamps, latencies and timings and hide the session id so that
  // identical inputs give identical bytes.
  bool reproducible = false;
};

// Sections, in order: METADATA, RAW DATASET, PROMPTS, TRANSCRIPT, FINDINGS,
// GROUNDING; a failed session stops after the last section it reached and
// ends with ERROR. The api key never appears.
std::string export_log(const Session& session, const LogOptions& options = {});

}  // namespace qualcode

#endif  // QUALCODE_SESSION_HPP_
