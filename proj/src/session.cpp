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

#include "qualcode/session.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <future>
#include <random>
#include <sstream>

#include "qualcode/csv.hpp"
#include "qualcode/error.hpp"
#include "qualcode/text.hpp"

namespace qualcode {

namespace {

using Clock = std::chrono::steady_clock;
constexpr const char* kMissingLabel = "<missing>";

void record(Session& s, Stage stage, Clock::time_point start) {
  const auto end = Clock::now();
  auto d = std::chrono::duration_cast<std::chrono::nanoseconds>(end - start);
  if (d.count() < 1) d = std::chrono::nanoseconds(1);
  auto& slot = s.timings.stages[static_cast<std::size_t>(stage)];
  slot = slot ? *slot + d : d;
  if (!s.timings.origin) s.timings.origin = start;
  auto total = std::chrono::duration_cast<std::chrono::nanoseconds>(end - *s.timings.origin);
  s.timings.total = std::max(total, s.timings.sum());
}

void attach_error(Session& s, StageError e) {
  if (!s.error) s.error = std::move(e);
}

// Runs `fn` as `stage`, recording its duration whether or not it succeeds.
template <class Fn>
bool timed(Session& s, Stage stage, Fn&& fn) {
  const auto start = Clock::now();
  StageError err;
  err.stage = stage;
  try {
    fn();
    record(s, stage, start);
    return true;
  } catch (const ClientError& e) {
    err.code = std::string(e.name());
    err.category = e.category();
    err.chunk_index = e.chunk_index();
    err.attempts = e.attempts();
    err.message = redact(e.what(), s.provider_config.api_key);
  } catch (const Error& e) {
    err.code = std::string(e.name());
    err.message = redact(e.what(), s.provider_config.api_key);
  } catch (const std::exception& e) {
    err.code = "Internal";
    err.message = redact(e.what(), s.provider_config.api_key);
  }
  record(s, stage, start);
  attach_error(s, std::move(err));
  return false;
}

std::string format_ms(std::chrono::nanoseconds d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", static_cast<double>(d.count()) / 1e6);
  return buf;
}

std::string format_time(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string one_line(std::string_view s) {
  std::string out(s);
  text::replace_all(out, "\r\n", "\\n");
  text::replace_all(out, "\n", "\\n");
  return out;
}

void section(std::string& out, std::string_view name) {
  out += "=== ";
  out += name;
  out += " ===\n";
}

void write_metadata(std::string& out, const Session& s, const LogOptions& o) {
  const auto& pc = s.provider_config;
  const auto& spec = s.spec;
  section(out, "METADATA");
  out += "session: " + (o.reproducible ? std::string("reproducible") : s.id) + "\n";
  out += "created_at: " +
         format_time(o.reproducible ? std::chrono::system_clock::time_point{} : s.created_at) +
         "\n";
  out += "source: " + s.source_name + "\n";
  out += "provider: " + (s.provider_name.empty() ? std::string("(none)") : s.provider_name) +
         "\n";
  out += "model: " + pc.model + "\n";
  out += "base_url: " + pc.base_url + "\n";
  out += std::string("api_key: ") + (pc.api_key.empty() ? "(not set)" : "REDACTED") + "\n";
  out += "temperature: " + format_double(pc.temperature) + "\n";
  out += "timeout_ms: " + std::to_string(pc.timeout.count()) + "\n";
  out += "max_retries: " + std::to_string(pc.max_retries) + "\n";
  out += "mode: " + std::string(analysis_mode_name(spec.mode)) + "\n";
  out += "data_type: " + spec.data_type.id() + "\n";
  out += std::string("role_play: ") + (spec.role_play ? "true" : "false") + "\n";
  if (spec.mode == AnalysisMode::kThematic) {
    out += "n_themes: " + std::to_string(spec.n_themes) + "\n";
  }
  out += "background: " + one_line(spec.background) + "\n";
  out += "custom_instructions: " + one_line(spec.custom_instructions) + "\n";
  if (spec.codebook) {
    out += "codebook_labels: " + std::to_string(spec.codebook->size()) + "\n";
    out += "codebook_irrelevant_id: " + std::to_string(spec.codebook->irrelevant_id()) + "\n";
    out += "codebook_other_id: " + std::to_string(spec.codebook->other_id()) + "\n";
  }
  out += "prior_examples: " + std::to_string(spec.prior_examples.size()) + "\n";
  out += "budget_max_tokens: " + std::to_string(s.budget.max_tokens_per_request) + "\n";
  out += "budget_chars_per_token: " + format_double(s.budget.chars_per_token) + "\n";
  out += "budget_prompt_overhead: " + std::to_string(s.budget.prompt_overhead_tokens) + "\n";
  for (const auto& n : s.notes) out += "note: " + n + "\n";
  if (s.corpus) {
    const auto& r = s.corpus->load_report();
    out += "entries: " + std::to_string(s.corpus->size()) + "\n";
    out += "skipped_units: " + std::to_string(r.skipped) + "\n";
    out += "roles: " + text::join(s.corpus->roles(), ", ") + "\n";
  }
  out += "chunks: " + std::to_string(s.chunks.size()) + "\n";
  for (std::size_t i = 0; i < kStageCount; ++i) {
    const auto& t = s.timings.stages[i];
    out += "timing_" + std::string(stage_name(static_cast<Stage>(i))) + "_ms: ";
    if (!t) {
      out += "-\n";
    } else {
      out += (o.reproducible ? std::string("0.000") : format_ms(*t)) + "\n";
    }
  }
  out += "timing_total_ms: " +
         (o.reproducible ? std::string("0.000") : format_ms(s.timings.total)) + "\n";
  out += std::string("status: ") +
         (s.error ? "failed" : (s.has_result() ? "completed" : "pending")) + "\n";
}

void write_messages(std::string& out, const std::vector<ChatMessage>& msgs) {
  for (const auto& m : msgs) {
    out += "[" + std::string(chat_role_name(m.role)) + "]\n";
    out += m.content;
    if (m.content.empty() || m.content.back() != '\n') out += "\n";
  }
}

void write_prompts(std::string& out, const Session& s) {
  section(out, "PROMPTS");
  const auto& b = *s.bundle;
  std::vector<std::string> frags;
  for (const auto& f : b.preamble) {
    frags.push_back(f.id + "[" + std::string(fragment_kind_name(f.kind)) + "]");
  }
  out += "fragments: " + text::join(frags, ", ") + "\n";
  out += "--- preamble ---\n";
  write_messages(out, b.preamble_messages());
  for (std::size_t k = 0; k < b.chunk_messages.size(); ++k) {
    std::string head = "--- chunk " + std::to_string(k);
    if (k < s.chunks.size()) {
      const auto& c = s.chunks[k];
      head += " | entries " + std::to_string(c.first) + "-" +
              std::to_string(c.first + c.count - 1) + " | ~" +
              std::to_string(c.estimated_tokens) + " tokens";
      if (c.oversized) head += " | oversized";
    }
    out += head + " ---\n";
    out += b.chunk_messages[k];
    if (b.chunk_messages[k].empty() || b.chunk_messages[k].back() != '\n') out += "\n";
  }
}

void write_transcript(std::string& out, const Session& s, const LogOptions& o) {
  section(out, "TRANSCRIPT");
  const auto records = s.transcript.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    std::string head = "--- request " + std::to_string(i + 1);
    head += " | chunk " + (r.chunk_index ? std::to_string(*r.chunk_index) : std::string("-"));
    head += " | attempt " + std::to_string(r.attempt);
    head += " | http " + std::to_string(r.http_status);
    head += " | latency_ms " + (o.reproducible ? std::string("0.000") : format_ms(r.latency));
    head += " | at " +
            format_time(o.reproducible ? std::chrono::system_clock::time_point{} : r.timestamp);
    if (r.usage) {
      head += " | tokens " + std::to_string(r.usage->prompt_tokens) + "+" +
              std::to_string(r.usage->completion_tokens);
    }
    out += head + " ---\n";
    write_messages(out, r.request);
    if (r.error) {
      out += "[error]\n" + *r.error + "\n";
      if (!r.response.empty()) out += "[body]\n" + r.response + "\n";
    } else {
      write_messages(out, {ChatMessage{ChatRole::kAssistant, r.response}});
    }
  }
}

void write_findings(std::string& out, const Session& s) {
  section(out, "FINDINGS");
  if (const auto* t = s.themes()) {
    out += "themes: " + std::to_string(t->rows.size()) + "\n";
    std::vector<std::string> prov;
    for (auto k : t->provenance) prov.push_back(std::to_string(k));
    out += "chunks: " + text::join(prov, ", ") + "\n";
    out += render_theme_table(*t);
    for (const auto& w : t->warnings) out += "warning: " + w + "\n";
  } else if (const auto* c = s.codes()) {
    out += "assignments: " + std::to_string(c->assignments.size()) + "\n";
    out += render_code_table(*c);
    for (const auto& w : c->warnings) out += "warning: " + w + "\n";
  }
}

void write_grounding(std::string& out, const Session& s) {
  section(out, "GROUNDING");
  if (!s.grounding) {
    out += "not applicable\n";
    return;
  }
  const auto& g = *s.grounding;
  char rate[32];
  std::snprintf(rate, sizeof rate, "%.4f", g.hallucination_rate);
  out += "quotes: " + std::to_string(g.total) + "\n";
  out += "unmatched: " + std::to_string(g.unmatched) + "\n";
  out += std::string("hallucination_rate: ") + rate + "\n";
  for (const auto& c : g.checks) {
    out += c.matched ? "ok      " : "UNMATCHED ";
    out += c.theme + " :: \"" + one_line(c.quote) + "\"";
    if (c.matched_entry_index) out += " (entry " + std::to_string(*c.matched_entry_index) + ")";
    out += "\n";
  }
}

void write_error(std::string& out, const StageError& e) {
  section(out, "ERROR");
  out += "stage: " + std::string(stage_name(e.stage)) + "\n";
  out += "code: " + e.code + "\n";
  if (e.category) out += "category: " + std::string(error_category_name(*e.category)) + "\n";
  if (e.chunk_index) out += "chunk: " + std::to_string(*e.chunk_index) + "\n";
  if (e.attempts > 0) out += "attempts: " + std::to_string(e.attempts) + "\n";
  out += "message: " + one_line(e.message) + "\n";
}

}  // namespace

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kIngest: return "ingest";
    case Stage::kChunk: return "chunk";
    case Stage::kPrompt: return "prompt";
    case Stage::kLlm: return "llm";
    case Stage::kParse: return "parse";
    case Stage::kExport: return "export";
  }
  return "ingest";
}

std::chrono::nanoseconds StageTimings::sum() const {
  std::chrono::nanoseconds total{0};
  for (const auto& s : stages) {
    if (s) total += *s;
  }
  return total;
}

std::string new_session_id() {
  static std::atomic<std::uint64_t> counter{0};
  static const std::uint64_t salt = [] {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }();
  const std::uint64_t n = ++counter;
  std::mt19937_64 rng(salt ^ (n * 0x9E3779B97F4A7C15ULL));
  char buf[48];
  std::snprintf(buf, sizeof buf, "%016" PRIx64 "%08" PRIx64, rng(), n);
  return buf;
}

Session make_session(PromptSpec spec, ProviderConfig provider_config, TokenBudget budget) {
  Session s;
  s.id = new_session_id();
  s.created_at = std::chrono::system_clock::now();
  s.spec = std::move(spec);
  s.provider_config = std::move(provider_config);
  s.budget = budget;
  return s;
}

bool ingest(Session& session, std::string_view bytes, const std::string& source_name,
            const LoadOptions& options) {
  session.source_name = source_name;
  return timed(session, Stage::kIngest,
               [&] { session.corpus = load_bytes(bytes, source_name, options); });
}

void set_corpus(Session& session, Corpus corpus, const std::string& source_name) {
  const auto start = Clock::now();
  session.source_name = source_name;
  session.corpus = std::move(corpus);
  record(session, Stage::kIngest, start);
}

bool run(Session& s, const LlmClient& client, const RunOptions& options) {
  s.error.reset();
  s.result = std::monostate{};
  s.grounding.reset();
  s.chunks.clear();
  s.bundle.reset();
  s.transcript = Transcript{};
  for (std::size_t i = 1; i < kStageCount; ++i) s.timings.stages[i].reset();
  s.provider_config = client.config();
  s.provider_name = client.provider().name();

  if (!s.corpus) {
    attach_error(s, StageError{Stage::kIngest, std::string(error_code_name(ErrorCode::kPrecondition)),
                               std::nullopt, std::nullopt, 0, "no corpus loaded"});
    return false;
  }
  const Corpus& corpus = *s.corpus;
  const PromptTemplates& templates =
      options.templates ? *options.templates : PromptTemplates::builtin();

  if (!timed(s, Stage::kChunk, [&] {
        s.budget.validate();
        s.chunks = segment(corpus, s.budget);
      })) {
    return false;
  }
  if (!timed(s, Stage::kPrompt, [&] {
        s.spec.validate();
        s.bundle = build_bundle(s.spec, corpus, s.chunks, templates);
      })) {
    return false;
  }
  std::vector<std::string> responses;
  if (!timed(s, Stage::kLlm, [&] {
        ChunkedOptions co;
        co.independent = options.independent_chunks && s.spec.mode != AnalysisMode::kThematic;
        co.on_progress = options.on_progress;
        responses = client.run_chunked(*s.bundle, s.transcript, co);
      })) {
    return false;
  }
  Result parsed;
  std::optional<GroundingReport> grounding;
  const bool ok = timed(s, Stage::kParse, [&] {
    if (s.spec.mode == AnalysisMode::kThematic) {
      std::vector<ThemeTable> tables;
      for (std::size_t k = 0; k < responses.size(); ++k) {
        tables.push_back(parse_theme_table(responses[k], k));
      }
      ThemeTable merged = merge_theme_tables(tables, static_cast<std::size_t>(s.spec.n_themes));
      grounding = ground_quotes(merged, corpus);
      parsed = std::move(merged);
    } else {
      const Codebook* cb = s.spec.mode == AnalysisMode::kDeductive && s.spec.codebook
                               ? &*s.spec.codebook
                               : nullptr;
      std::vector<CodeTable> tables;
      for (const auto& r : responses) tables.push_back(parse_code_table(r, corpus.size(), cb));
      CodeTable merged = merge_code_tables(tables);
      const auto missing = merged.missing(corpus.size());
      if (!missing.empty()) {
        merged.warnings.push_back(std::to_string(missing.size()) + " of " +
                                  std::to_string(corpus.size()) + " entries were not coded");
      }
      parsed = std::move(merged);
    }
  });
  if (!ok) return false;
  s.result = std::move(parsed);
  s.grounding = std::move(grounding);
  return true;
}

std::vector<Label> label_vector(const CodeTable& table, std::size_t corpus_size) {
  std::vector<Label> labels(corpus_size, kMissingLabel);
  for (const auto& a : table.assignments) {
    if (a.entry_index < corpus_size) labels[a.entry_index] = a.code;
  }
  return labels;
}

RunSet run_repeated(const Session& prototype, const LlmClient& client, std::size_t n,
                    const RunOptions& options, TiePolicy ties) {
  if (n < 2) throw Error(ErrorCode::kPrecondition, "repeated runs need n >= 2");
  if (!prototype.corpus) throw Error(ErrorCode::kPrecondition, "no corpus loaded");
  RunSet set;
  set.runs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Session copy = prototype;
    copy.id = new_session_id();
    copy.created_at = std::chrono::system_clock::now();
    copy.notes.push_back("run=" + std::to_string(i + 1) + "/" + std::to_string(n));
    set.runs.push_back(std::move(copy));
  }
  if (client.provider().supports_concurrency()) {
    std::vector<std::future<void>> futures;
    for (auto& s : set.runs) {
      futures.push_back(std::async(std::launch::async, [&s, &client, &options] {
        RunOptions o = options;
        o.on_progress = nullptr;
        run(s, client, o);
      }));
    }
    for (auto& f : futures) f.get();
  } else {
    for (auto& s : set.runs) run(s, client, options);
  }

  const std::size_t size = prototype.corpus->size();
  std::vector<std::vector<Label>> vectors;
  for (const auto& s : set.runs) {
    const auto* codes = s.codes();
    if (!codes) return set;
    vectors.push_back(label_vector(*codes, size));
  }
  try {
    set.fleiss = fleiss_kappa(MultiRaterMatrix::from_runs(vectors));
    set.consensus = majority_consensus(vectors, ties);
  } catch (const Error& e) {
    set.agreement_error = e.what();
  }
  return set;
}

std::string export_csv(const Result& result, const ExportOptions& options) {
  csv::Writer w("|");
  if (const auto* t = std::get_if<ThemeTable>(&result)) {
    w.write_row({"Theme", "Description", "Quotes", "ParticipantCount"});
    for (const auto& r : t->rows) {
      w.write_row({r.theme, r.description, text::join(r.quotes, options.quote_delimiter),
                   std::to_string(r.participant_count)});
    }
    return w.take();
  }
  if (const auto* c = std::get_if<CodeTable>(&result)) {
    w.write_row({"Index", "Code"});
    for (const auto& a : c->assignments) w.write_row({std::to_string(a.entry_index), a.code});
    return w.take();
  }
  throw Error(ErrorCode::kNoResult, "the session has no result to export");
}

std::string export_results(Session& session, const ExportOptions& options) {
  const auto start = Clock::now();
  std::string out = export_csv(session.result, options);
  record(session, Stage::kExport, start);
  return out;
}

std::string export_consensus_csv(const Consensus& consensus) {
  csv::Writer w("|");
  w.write_row({"Index", "Code"});
  for (std::size_t i = 0; i < consensus.labels.size(); ++i) {
    w.write_row({std::to_string(i), consensus.labels[i].value_or("")});
  }
  return w.take();
}

std::string export_log(const Session& s, const LogOptions& options) {
  std::string out;
  write_metadata(out, s, options);
  if (s.corpus) {
    section(out, "RAW DATASET");
    out += to_canonical_csv(*s.corpus);
  }
  if (s.bundle) write_prompts(out, s);
  if (!s.transcript.empty()) write_transcript(out, s, options);
  if (s.has_result()) {
    write_findings(out, s);
    write_grounding(out, s);
  }
  if (s.error) write_error(out, *s.error);
  return redact(std::move(out), s.provider_config.api_key);
}

}  // namespace qualcode
