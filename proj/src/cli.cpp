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

#include "qualcode/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "qualcode/agreement.hpp"
#include "qualcode/corpus.hpp"
#include "qualcode/error.hpp"
#include "qualcode/mock_provider.hpp"
#include "qualcode/service.hpp"
#include "qualcode/session.hpp"
#include "qualcode/text.hpp"

namespace qualcode {

namespace {

namespace fs = std::filesystem;

// Thrown for problems the user has to fix in the invocation.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SharedFlags {
  std::map<std::string, std::string> settings;
  std::string config_file;
  bool show_config = false;
  std::string mock_fault;
};

struct InputFlags {
  std::string input;
  std::string format;
  std::string text_column;
  std::string speaker_column;
  std::string txt_mode;
  std::string sheet;
  std::string out;
  std::string log;
};

void add_setting(CLI::App* app, const std::string& flag, const std::string& key,
                 SharedFlags& flags, const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&flags, key](const std::string& v) { flags.settings[key] = v; }, help);
}

void add_switch(CLI::App* app, const std::string& flag, const std::string& key,
                SharedFlags& flags, const std::string& help) {
  app->add_flag_callback(flag, [&flags, key] { flags.settings[key] = "true"; }, help);
}

void add_shared(CLI::App* app, SharedFlags& f) {
  app->add_option("--config", f.config_file, "key = value settings file");
  app->add_flag("--show-config", f.show_config, "print the effective settings and exit");
  add_switch(app, "--mock", "mock", f, "use the offline mock provider");
  add_setting(app, "--seed", "seed", f, "mock provider seed");
  app->add_option("--mock-fault", f.mock_fault,
                  "fail every request: timeout, connect, server-error, rate-limit, "
                  "context-length, policy, malformed, empty");
  add_setting(app, "--model", "model", f, "model name");
  add_setting(app, "--base-url", "base_url", f, "chat-completions base URL");
  add_setting(app, "--temperature", "temperature", f, "sampling temperature");
  add_setting(app, "--timeout-ms", "timeout_ms", f, "request timeout");
  add_setting(app, "--max-retries", "max_retries", f, "retries for transient failures");
  add_setting(app, "--retry-delay-ms", "retry_delay_ms", f, "base backoff delay");
  add_setting(app, "--max-tokens", "max_tokens", f, "token budget per request");
  add_setting(app, "--chars-per-token", "chars_per_token", f, "token estimate ratio");
  add_setting(app, "--prompt-overhead", "prompt_overhead", f, "tokens reserved per request");
  add_setting(app, "--templates", "templates", f, "directory of prompt template overrides");
  add_switch(app, "--reproducible", "reproducible", f, "zero timestamps and timings in exports");
}

void add_prompt_flags(CLI::App* app, SharedFlags& f) {
  add_setting(app, "--type", "data_type", f,
              "interview, focus-group, social-media or other:<name>");
  add_switch(app, "--role-play", "role_play", f, "send the analyst persona");
  add_setting(app, "--background", "background", f, "research background");
  add_setting(app, "--instructions", "instructions", f, "custom instructions");
}

void add_input(CLI::App* app, InputFlags& in) {
  app->add_option("input", in.input, "data file (txt, csv, xlsx, docx)")->required();
  app->add_option("--format", in.format, "txt, csv, xlsx or docx (default: from extension)");
  app->add_option("--text-column", in.text_column, "CSV/XLSX text column (default: text)");
  app->add_option("--speaker-column", in.speaker_column, "CSV/XLSX speaker column");
  app->add_option("--txt-mode", in.txt_mode, "lines (default) or turns");
  app->add_option("--sheet", in.sheet, "XLSX worksheet name");
  app->add_option("--out", in.out, "results CSV path");
  app->add_option("--log", in.log, "full text log path");
}

CliConfig resolve_config(const SharedFlags& f, const EnvLookup& env) {
  CliConfig c;
  try {
    std::string file = f.config_file;
    if (file.empty()) {
      if (const char* v = env("QUALI_CONFIG")) file = v;
    }
    if (!file.empty()) {
      if (!fs::is_regular_file(file)) throw UsageError("cannot read config file '" + file + "'");
      apply_config_file(c, read_file(file));
    }
    apply_env(c, env);
    for (const auto& [key, value] : f.settings) apply_setting(c, key, value);
    c.provider.validate();
    c.budget.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return c;
}

LoadOptions load_options(const InputFlags& in) {
  LoadOptions lo;
  if (!in.format.empty()) {
    const auto f = parse_input_format(in.format);
    if (!f) throw UsageError("unknown --format '" + in.format + "'");
    lo.format = *f;
  }
  if (in.txt_mode == "turns") {
    lo.txt_mode = TxtMode::kSpeakerTurns;
  } else if (!in.txt_mode.empty() && in.txt_mode != "lines") {
    throw UsageError("--txt-mode must be lines or turns");
  }
  if (!in.text_column.empty()) lo.columns.text_column = in.text_column;
  if (!in.speaker_column.empty()) lo.columns.speaker_column = in.speaker_column;
  if (!in.sheet.empty()) lo.sheet = in.sheet;
  return lo;
}

std::string read_input(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw UsageError("cannot read " + what + " '" + path + "'");
  return read_file(path);
}

void write_output(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  os << bytes;
  if (!os) throw Error(ErrorCode::kPrecondition, "cannot write '" + path + "'");
}

struct Backend {
  std::shared_ptr<Provider> provider;
  LlmClient::Options options;
};

Backend make_backend(const CliConfig& c, const SharedFlags& f) {
  Backend b;
  if (c.mock) {
    MockOptions mo;
    mo.seed = c.seed;
    b.provider = make_mock_provider(mo);
  } else {
    b.provider = make_http_provider();
  }
  if (!f.mock_fault.empty()) {
    const auto fault = parse_fault(f.mock_fault);
    if (!fault) throw UsageError("unknown --mock-fault '" + f.mock_fault + "'");
    b.provider = std::make_shared<FaultInjectingProvider>(b.provider, std::vector<Fault>{}, *fault);
  }
  b.options.retry.base_delay = std::chrono::milliseconds(c.retry_delay_ms);
  if (c.reproducible) b.options.retry.jitter_seed = c.seed;
  return b;
}

PromptSpec base_spec(const CliConfig& c) {
  PromptSpec spec;
  const auto type = DataType::parse(c.data_type);
  if (!type) throw UsageError("unknown data type '" + c.data_type + "'");
  spec.data_type = *type;
  spec.role_play = c.role_play;
  spec.n_themes = c.n_themes;
  spec.background = c.background;
  spec.custom_instructions = c.instructions;
  return spec;
}

Session prepare_session(const CliConfig& c, PromptSpec spec) {
  try {
    spec.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  Session s = make_session(std::move(spec), c.provider, c.budget);
  if (c.mock) s.notes.push_back("seed=" + std::to_string(c.seed));
  return s;
}

std::optional<PromptTemplates> load_templates(const CliConfig& c) {
  if (c.templates_dir.empty()) return std::nullopt;
  if (!fs::is_directory(c.templates_dir)) {
    throw UsageError("template directory '" + c.templates_dir + "' does not exist");
  }
  return PromptTemplates::with_overrides(c.templates_dir);
}

void report_failure(const Session& s, std::ostream& err) {
  const auto& e = *s.error;
  err << "error: stage=" << stage_name(e.stage);
  if (e.category) err << " category=" << error_category_name(*e.category);
  err << " code=" << e.code;
  if (e.chunk_index) err << " chunk=" << *e.chunk_index;
  if (e.attempts > 0) err << " attempts=" << e.attempts;
  err << ": " << e.message << "\n";
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
  return (p.parent_path() / (p.stem().string() + "." + suffix + ext)).string();
}

std::string four(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

int finish_log(const Session& s, const CliConfig& c, const std::string& path) {
  if (path.empty()) return kExitOk;
  LogOptions lo;
  lo.reproducible = c.reproducible;
  write_output(path, export_log(s, lo));
  return kExitOk;
}

int cmd_analyze(const SharedFlags& f, const InputFlags& in, const EnvLookup& env,
                std::ostream& out, std::ostream& err) {
  const CliConfig c = resolve_config(f, env);
  if (f.show_config) {
    out << render_config(c);
    return kExitOk;
  }
  const std::string bytes = read_input(in.input, "input file");
  const LoadOptions lo = load_options(in);
  PromptSpec spec = base_spec(c);
  spec.mode = AnalysisMode::kThematic;
  Session s = prepare_session(c, std::move(spec));
  const auto templates = load_templates(c);
  Backend backend = make_backend(c, f);
  LlmClient client(backend.provider, c.provider, backend.options);

  RunOptions ro;
  if (templates) ro.templates = &*templates;
  if (ingest(s, bytes, fs::path(in.input).filename().string(), lo)) run(s, client, ro);
  if (s.failed()) {
    finish_log(s, c, in.log);
    report_failure(s, err);
    return kExitPipeline;
  }
  const std::string csv_bytes = export_results(s);
  if (!in.out.empty()) write_output(in.out, csv_bytes);
  finish_log(s, c, in.log);

  const ThemeTable& t = *s.themes();
  out << "themes\t" << t.rows.size() << "\n";
  out << "hallucination_rate\t" << four(s.grounding->hallucination_rate) << "\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out << "theme\t" << (i + 1) << "\t" << t.rows[i].participant_count << "\t" << t.rows[i].theme
        << "\n";
  }
  for (const auto& w : t.warnings) err << "warning: " << w << "\n";
  return kExitOk;
}

struct CodeFlags {
  std::string mode = "inductive";
  std::string codebook;
  std::string prior;
  int runs = 1;
  bool independent = false;
  std::optional<int> irrelevant_id;
  std::optional<int> other_id;
};

int cmd_code(const SharedFlags& f, const InputFlags& in, const CodeFlags& cf,
             const EnvLookup& env, std::ostream& out, std::ostream& err) {
  const CliConfig c = resolve_config(f, env);
  if (f.show_config) {
    out << render_config(c);
    return kExitOk;
  }
  const auto mode = parse_analysis_mode(cf.mode);
  if (!mode || *mode == AnalysisMode::kThematic) {
    throw UsageError("--mode must be inductive or deductive");
  }
  if (cf.runs < 1) throw UsageError("--runs must be at least 1");
  const std::string bytes = read_input(in.input, "input file");
  const LoadOptions lo = load_options(in);

  PromptSpec spec = base_spec(c);
  spec.mode = *mode;
  try {
    if (!cf.codebook.empty()) {
      spec.codebook = load_codebook_csv(read_input(cf.codebook, "codebook"), cf.irrelevant_id,
                                        cf.other_id);
    }
    if (!cf.prior.empty()) {
      spec.prior_examples = load_prior_examples_csv(read_input(cf.prior, "prior examples file"));
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  Session proto = prepare_session(c, std::move(spec));
  const auto templates = load_templates(c);
  Backend backend = make_backend(c, f);
  LlmClient client(backend.provider, c.provider, backend.options);
  RunOptions ro;
  ro.independent_chunks = cf.independent;
  if (templates) ro.templates = &*templates;

  if (!ingest(proto, bytes, fs::path(in.input).filename().string(), lo)) {
    finish_log(proto, c, in.log);
    report_failure(proto, err);
    return kExitPipeline;
  }

  std::vector<Session> runs;
  std::optional<RunSet> set;
  if (cf.runs == 1) {
    run(proto, client, ro);
    runs.push_back(std::move(proto));
  } else {
    set = run_repeated(proto, client, static_cast<std::size_t>(cf.runs), ro);
    runs = set->runs;
  }

  int status = kExitOk;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    Session& s = runs[k];
    const std::string tag = "run" + std::to_string(k + 1);
    const std::string out_path = in.out.empty() || runs.size() == 1 ? in.out : with_suffix(in.out, tag);
    const std::string log_path = in.log.empty() || runs.size() == 1 ? in.log : with_suffix(in.log, tag);
    if (s.failed()) {
      finish_log(s, c, log_path);
      report_failure(s, err);
      status = kExitPipeline;
      continue;
    }
    const std::string csv_bytes = export_results(s);
    if (!out_path.empty()) write_output(out_path, csv_bytes);
    finish_log(s, c, log_path);
    const CodeTable& t = *s.codes();
    out << "run\t" << (k + 1) << "\tcoded\t" << t.assignments.size() << "\tmissing\t"
        << t.missing(s.corpus->size()).size() << "\n";
    for (const auto& w : t.warnings) err << "warning: run " << (k + 1) << ": " << w << "\n";
  }
  if (set) {
    if (set->fleiss) {
      out << "fleiss\t" << four(set->fleiss->value) << "\t" << kappa_band_name(set->fleiss->band)
          << "\n";
    }
    if (set->consensus) {
      out << "consensus_unresolved\t" << set->consensus->unresolved.size() << "\n";
      if (!in.out.empty()) {
        write_output(with_suffix(in.out, "consensus"), export_consensus_csv(*set->consensus));
      }
    }
    if (set->agreement_error) err << "warning: agreement: " << *set->agreement_error << "\n";
  }
  return status;
}

int cmd_irr(const std::string& path, const std::string& stat, std::ostream& out) {
  const std::string bytes = read_input(path, "ratings file");
  MultiRaterMatrix m;
  try {
    m = read_ratings_csv(bytes);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  AgreementResult r;
  if (stat == "cohen") {
    if (m.raters() != 2) {
      throw UsageError("cohen needs exactly 2 rater columns, found " + std::to_string(m.raters()));
    }
    PairedLabels p;
    for (const auto& row : m.items) p.items.emplace_back(row[0], row[1]);
    r = cohen_kappa(p);
  } else if (stat == "fleiss") {
    r = fleiss_kappa(m);
  } else if (stat == "percent") {
    r = percent_agreement(m);
  } else {
    throw UsageError("--stat must be cohen, fleiss or percent");
  }
  out << four(r.value) << " " << kappa_band_name(r.band) << "\n";
  return kExitOk;
}

int cmd_serve(const SharedFlags& f, const std::optional<std::string>& host,
              const std::optional<int>& port, double ttl_minutes, const EnvLookup& env,
              std::ostream& out, std::ostream& err) {
  CliConfig c = resolve_config(f, env);
  if (host) c.host = *host;
  if (port) c.port = *port;
  if (f.show_config) {
    out << render_config(c);
    return kExitOk;
  }
  ServiceOptions so;
  so.budget = c.budget;
  so.client_options.retry.base_delay = std::chrono::milliseconds(c.retry_delay_ms);
  so.ttl = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double, std::ratio<60>>(ttl_minutes));
  Service service(std::move(so));
  out << "listening\thttp://" << c.host << ":" << c.port << "\n" << std::flush;
  if (!service.listen(c.host, c.port)) {
    err << "error: cannot listen on " << c.host << ":" << c.port << "\n";
    return kExitPipeline;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env) {
  CLI::App app{"Qualitative coding with chat-completion models"};
  app.name("qualcode");
  app.require_subcommand(1);

  SharedFlags analyze_flags, code_flags, serve_flags;
  InputFlags analyze_in, code_in;
  CodeFlags cf;
  std::string irr_path, irr_stat = "cohen";
  std::optional<std::string> host;
  std::optional<int> port;
  double ttl_minutes = 120;

  auto* analyze = app.add_subcommand("analyze", "thematic analysis of a corpus");
  add_input(analyze, analyze_in);
  add_shared(analyze, analyze_flags);
  add_prompt_flags(analyze, analyze_flags);
  add_setting(analyze, "--themes", "n_themes", analyze_flags, "number of themes");

  auto* code = app.add_subcommand("code", "inductive or deductive coding of every entry");
  add_input(code, code_in);
  add_shared(code, code_flags);
  add_prompt_flags(code, code_flags);
  code->add_option("--mode", cf.mode, "inductive or deductive");
  code->add_option("--codebook", cf.codebook, "codebook CSV (id,name,definition)");
  code->add_option("--prior", cf.prior, "already coded examples CSV (text,code)");
  code->add_option("--runs", cf.runs, "independent runs; >1 adds agreement and consensus");
  code->add_option("--irrelevant-id", cf.irrelevant_id, "codebook id for irrelevant entries");
  code->add_option("--other-id", cf.other_id, "codebook id for relevant but uncovered entries");
  code->add_flag("--independent", cf.independent, "send chunks without conversation chaining");

  auto* irr = app.add_subcommand("irr", "agreement statistics for a ratings CSV");
  irr->add_option("ratings", irr_path, "CSV with one column per rater")->required();
  irr->add_option("--stat", irr_stat, "cohen, fleiss or percent");

  auto* serve = app.add_subcommand("serve", "run the HTTP JSON service");
  add_shared(serve, serve_flags);
  serve->add_option("--host", host, "bind address (default 127.0.0.1)");
  serve->add_option("--port", port, "port (default 8642)");
  serve->add_option("--ttl-minutes", ttl_minutes, "idle session lifetime");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run 'qualcode --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_flags, analyze_in, env, out, err);
    if (code->parsed()) return cmd_code(code_flags, code_in, cf, env, out, err);
    if (irr->parsed()) return cmd_irr(irr_path, irr_stat, out);
    if (serve->parsed()) return cmd_serve(serve_flags, host, port, ttl_minutes, env, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitPipeline;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run_cli(args, out, err, [](const char* name) { return std::getenv(name); });
}

}  // namespace qualcode
