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

#include "qualcode/service.hpp"

#include <httplib.h>

#include <json.hpp>

#include "qualcode/corpus.hpp"
#include "qualcode/error.hpp"
#include "qualcode/mock_provider.hpp"
#include "qualcode/session.hpp"
#include "qualcode/text.hpp"

namespace qualcode {

using json = nlohmann::json;

struct Service::Entry {
  std::mutex mu;
  Session session;
  SessionStatus status = SessionStatus::kConfigured;
  std::size_t done = 0;
  std::size_t total = 0;
  std::chrono::steady_clock::time_point touched;
  std::shared_ptr<Provider> provider;
  LlmClient::Options client_options;
  bool reproducible = false;
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view name, const std::string& detail,
                const std::string& secret = {}) {
  send_json(res, status, json{{"error", name}, {"detail", redact(detail, secret)}});
}

template <class T>
T field_or(const json& body, const char* key, T fallback) {
  if (!body.contains(key) || body[key].is_null()) return fallback;
  return body[key].get<T>();
}

ProviderConfig provider_from_json(const json& body, bool mock) {
  ProviderConfig pc;
  if (body.contains("model")) {
    pc.model = body["model"].get<std::string>();
  } else if (mock) {
    pc.model = "mock";
  } else {
    throw Error(ErrorCode::kInvalidConfig, "missing field 'model'");
  }
  pc.api_key = field_or<std::string>(body, "api_key", "");
  pc.base_url = field_or<std::string>(body, "base_url", pc.base_url);
  pc.temperature = field_or<double>(body, "temperature", pc.temperature);
  pc.max_retries = field_or<int>(body, "max_retries", pc.max_retries);
  pc.timeout = std::chrono::milliseconds(
      field_or<long long>(body, "timeout_ms", static_cast<long long>(pc.timeout.count())));
  pc.validate();
  return pc;
}

Codebook codebook_from_json(const json& body) {
  const auto irrelevant = body.contains("irrelevant_id")
                              ? std::optional<int>(body["irrelevant_id"].get<int>())
                              : std::nullopt;
  const auto other =
      body.contains("other_id") ? std::optional<int>(body["other_id"].get<int>()) : std::nullopt;
  if (body.contains("codebook_csv")) {
    return load_codebook_csv(body["codebook_csv"].get<std::string>(), irrelevant, other);
  }
  std::vector<CodeLabel> labels;
  for (const auto& l : body["codebook"]) {
    labels.push_back({l.at("id").get<int>(), l.at("name").get<std::string>(),
                      field_or<std::string>(l, "definition", "")});
  }
  return Codebook(std::move(labels), irrelevant, other);
}

PromptSpec spec_from_json(const json& body) {
  PromptSpec spec;
  const auto mode_name = field_or<std::string>(body, "mode", "thematic");
  const auto mode = parse_analysis_mode(mode_name);
  if (!mode) throw Error(ErrorCode::kInvalidSpec, "unknown mode '" + mode_name + "'");
  spec.mode = *mode;
  const auto type_id = field_or<std::string>(body, "data_type", "interview");
  const auto type = DataType::parse(type_id);
  if (!type) throw Error(ErrorCode::kInvalidSpec, "unknown data_type '" + type_id + "'");
  spec.data_type = *type;
  spec.role_play = field_or<bool>(body, "role_play", false);
  spec.n_themes = field_or<int>(body, "n_themes", spec.n_themes);
  spec.background = field_or<std::string>(body, "background", "");
  spec.custom_instructions = field_or<std::string>(body, "custom_instructions", "");
  if (body.contains("codebook") || body.contains("codebook_csv")) {
    spec.codebook = codebook_from_json(body);
  }
  if (body.contains("prior_examples_csv")) {
    spec.prior_examples = load_prior_examples_csv(body["prior_examples_csv"].get<std::string>());
  } else if (body.contains("prior_examples")) {
    for (const auto& p : body["prior_examples"]) {
      spec.prior_examples.push_back({p.at("text").get<std::string>(), p.at("code").get<std::string>()});
    }
  }
  spec.validate();
  return spec;
}

json grounding_json(const GroundingReport& g) {
  json checks = json::array();
  for (const auto& c : g.checks) {
    json jc{{"theme", c.theme}, {"quote", c.quote}, {"matched", c.matched}};
    jc["entry_index"] = c.matched_entry_index ? json(*c.matched_entry_index) : json(nullptr);
    checks.push_back(std::move(jc));
  }
  return json{{"total", g.total},
              {"unmatched", g.unmatched},
              {"hallucination_rate", g.hallucination_rate},
              {"checks", std::move(checks)}};
}

json results_json(const Session& s) {
  json out{{"mode", analysis_mode_name(s.spec.mode)}};
  if (const auto* t = s.themes()) {
    json rows = json::array();
    for (const auto& r : t->rows) {
      rows.push_back(json{{"theme", r.theme},
                          {"description", r.description},
                          {"quotes", r.quotes},
                          {"participant_count", r.participant_count}});
    }
    out["themes"] = std::move(rows);
    out["warnings"] = t->warnings;
  } else if (const auto* c = s.codes()) {
    json rows = json::array();
    for (const auto& a : c->assignments) rows.push_back(json{{"index", a.entry_index}, {"code", a.code}});
    out["assignments"] = std::move(rows);
    out["missing"] = c->missing(s.corpus ? s.corpus->size() : 0);
    out["warnings"] = c->warnings;
  }
  if (s.grounding) {
    out["grounding"] = grounding_json(*s.grounding);
    out["hallucination_rate"] = s.grounding->hallucination_rate;
  } else {
    out["grounding"] = nullptr;
    out["hallucination_rate"] = nullptr;
  }
  return out;
}

std::string form_value(const httplib::Request& req, const std::string& key) {
  return req.has_file(key) ? req.get_file_value(key).content : std::string();
}

}  // namespace

std::string_view session_status_name(SessionStatus status) {
  switch (status) {
    case SessionStatus::kConfigured: return "Configured";
    case SessionStatus::kRunning: return "Running";
    case SessionStatus::kDone: return "Done";
    case SessionStatus::kFailed: return "Failed";
  }
  return "Configured";
}

Service::Service(ServiceOptions options)
    : options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

Service::~Service() {
  stop();
  join_runs();
}

std::chrono::steady_clock::time_point Service::now() const {
  return options_.clock ? options_.clock() : std::chrono::steady_clock::now();
}

void Service::sweep() {
  const auto t = now();
  std::lock_guard<std::mutex> lock(mu_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    bool expired = false;
    {
      std::lock_guard<std::mutex> el(it->second->mu);
      expired = it->second->status != SessionStatus::kRunning &&
                t - it->second->touched > options_.ttl;
    }
    it = expired ? sessions_.erase(it) : std::next(it);
  }
}

std::shared_ptr<Service::Entry> Service::find(const std::string& id) {
  sweep();
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  std::lock_guard<std::mutex> el(it->second->mu);
  it->second->touched = now();
  return it->second;
}

std::size_t Service::session_count() {
  sweep();
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.size();
}

void Service::join_runs() {
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(workers_mu_);
    workers.swap(workers_);
  }
  for (auto& w : workers) {
    if (w.joinable()) w.join();
  }
}

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }
int Service::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }
bool Service::listen_after_bind() { return server_->listen_after_bind(); }
void Service::stop() { server_->stop(); }
void Service::wait_until_ready() const { server_->wait_until_ready(); }

void Service::install_routes() {
  auto& srv = *server_;

  srv.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
      if (!body.is_object()) throw Error(ErrorCode::kInvalidConfig, "body must be a JSON object");
    } catch (const json::exception& e) {
      send_error(res, 400, "MalformedJson", e.what());
      return;
    } catch (const Error& e) {
      send_error(res, 400, e.name(), e.detail());
      return;
    }
    const std::string secret = body.value("api_key", std::string());
    try {
      const bool mock = field_or<bool>(body, "mock", false);
      auto entry = std::make_shared<Entry>();
      entry->session = make_session(PromptSpec{}, provider_from_json(body, mock), options_.budget);
      if (body.contains("budget")) {
        const auto& b = body["budget"];
        auto& budget = entry->session.budget;
        budget.max_tokens_per_request =
            field_or<std::size_t>(b, "max_tokens", budget.max_tokens_per_request);
        budget.chars_per_token = field_or<double>(b, "chars_per_token", budget.chars_per_token);
        budget.prompt_overhead_tokens =
            field_or<std::size_t>(b, "prompt_overhead", budget.prompt_overhead_tokens);
        budget.validate();
      }
      entry->client_options = options_.client_options;
      if (body.contains("retry_delay_ms")) {
        entry->client_options.retry.base_delay =
            std::chrono::milliseconds(body["retry_delay_ms"].get<long long>());
      }
      if (mock) {
        MockOptions mo;
        mo.seed = field_or<std::uint64_t>(body, "seed", 0);
        entry->session.notes.push_back("seed=" + std::to_string(mo.seed));
        entry->provider = make_mock_provider(mo);
        if (body.contains("mock_fault")) {
          const auto name = body["mock_fault"].get<std::string>();
          const auto fault = parse_fault(name);
          if (!fault) throw Error(ErrorCode::kInvalidConfig, "unknown mock_fault '" + name + "'");
          entry->provider = std::make_shared<FaultInjectingProvider>(
              entry->provider, std::vector<Fault>{}, *fault);
        }
      } else {
        entry->provider = options_.make_provider ? options_.make_provider() : make_http_provider();
      }
      entry->reproducible = field_or<bool>(body, "reproducible", false);
      entry->touched = now();
      const std::string id = entry->session.id;
      {
        std::lock_guard<std::mutex> lock(mu_);
        sessions_[id] = std::move(entry);
      }
      send_json(res, 201, json{{"id", id}});
    } catch (const Error& e) {
      send_error(res, 400, e.name(), e.detail(), secret);
    } catch (const json::exception& e) {
      send_error(res, 400, "MalformedJson", e.what(), secret);
    }
  });

  srv.Post(R"(/api/sessions/([^/]+)/corpus)", [this](const httplib::Request& req,
                                                     httplib::Response& res) {
    auto entry = find(req.matches[1]);
    if (!entry) {
      send_error(res, 404, "NotFound", "unknown or expired session");
      return;
    }
    if (!req.is_multipart_form_data() || !req.has_file("file")) {
      send_error(res, 400, "MissingFile", "expected multipart/form-data with a 'file' part");
      return;
    }
    const auto file = req.get_file_value("file");
    LoadOptions lo;
    try {
      const std::string fmt = form_value(req, "format");
      if (!fmt.empty()) {
        const auto f = parse_input_format(fmt);
        if (!f) throw Error(ErrorCode::kInvalidSpec, "unknown format '" + fmt + "'");
        lo.format = *f;
      }
      const std::string txt_mode = form_value(req, "txt_mode");
      if (txt_mode == "turns" || txt_mode == "speaker-turns") lo.txt_mode = TxtMode::kSpeakerTurns;
      const std::string text_column = form_value(req, "text_column");
      if (!text_column.empty()) lo.columns.text_column = text_column;
      const std::string speaker_column = form_value(req, "speaker_column");
      if (!speaker_column.empty()) lo.columns.speaker_column = speaker_column;
      const std::string sheet = form_value(req, "sheet");
      if (!sheet.empty()) lo.sheet = sheet;
    } catch (const Error& e) {
      send_error(res, 422, e.name(), e.detail());
      return;
    }
    std::lock_guard<std::mutex> lock(entry->mu);
    if (entry->status == SessionStatus::kRunning) {
      send_error(res, 409, "Running", "a run is in progress");
      return;
    }
    Session& s = entry->session;
    const std::string name = file.filename.empty() ? "upload" : file.filename;
    Session trial = s;
    trial.error.reset();
    if (!ingest(trial, file.content, name, lo)) {
      send_error(res, 422, trial.error->code, trial.error->message, s.provider_config.api_key);
      return;
    }
    s = std::move(trial);
    s.result = std::monostate{};
    s.grounding.reset();
    entry->status = SessionStatus::kConfigured;
    const auto& r = s.corpus->load_report();
    send_json(res, 200, json{{"entries", s.corpus->size()}, {"skipped", r.skipped},
                             {"roles", s.corpus->roles()}});
  });

  srv.Post(R"(/api/sessions/([^/]+)/run)", [this](const httplib::Request& req,
                                                  httplib::Response& res) {
    auto entry = find(req.matches[1]);
    if (!entry) {
      send_error(res, 404, "NotFound", "unknown or expired session");
      return;
    }
    PromptSpec spec;
    bool independent = false;
    try {
      const json body = req.body.empty() ? json::object() : json::parse(req.body);
      spec = spec_from_json(body);
      independent = field_or<bool>(body, "independent_chunks", false);
    } catch (const json::exception& e) {
      send_error(res, 400, "MalformedJson", e.what());
      return;
    } catch (const Error& e) {
      send_error(res, 422, e.name(), e.detail());
      return;
    }
    Session work;
    std::shared_ptr<Provider> provider;
    LlmClient::Options client_options;
    {
      std::lock_guard<std::mutex> lock(entry->mu);
      if (entry->status == SessionStatus::kRunning) {
        send_error(res, 409, "Running", "a run is already in progress");
        return;
      }
      if (!entry->session.corpus) {
        send_error(res, 409, "NoCorpus", "upload a corpus before running");
        return;
      }
      entry->session.spec = spec;
      entry->status = SessionStatus::kRunning;
      entry->done = 0;
      entry->total = 0;
      work = entry->session;
      provider = entry->provider;
      client_options = entry->client_options;
    }
    std::lock_guard<std::mutex> wl(workers_mu_);
    workers_.emplace_back([this, entry, work = std::move(work), provider, client_options,
                           independent]() mutable {
      LlmClient client(provider, work.provider_config, client_options);
      RunOptions ro;
      ro.independent_chunks = independent;
      ro.on_progress = [entry](std::size_t done, std::size_t total) {
        std::lock_guard<std::mutex> lock(entry->mu);
        entry->done = std::max(entry->done, done);
        entry->total = total;
      };
      run(work, client, ro);
      if (work.has_result()) export_results(work);
      std::lock_guard<std::mutex> lock(entry->mu);
      entry->total = work.chunks.size();
      if (!work.failed()) entry->done = entry->total;
      entry->status = work.failed() ? SessionStatus::kFailed : SessionStatus::kDone;
      entry->session = std::move(work);
      entry->touched = now();
    });
    send_json(res, 202, json{{"status", "Running"}});
  });

  srv.Get(R"(/api/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto entry = find(req.matches[1]);
    if (!entry) {
      send_error(res, 404, "NotFound", "unknown or expired session");
      return;
    }
    std::lock_guard<std::mutex> lock(entry->mu);
    const Session& s = entry->session;
    json out{{"id", s.id},
             {"status", session_status_name(entry->status)},
             {"progress", json{{"done", entry->done}, {"total", entry->total}}},
             {"model", s.provider_config.model},
             {"provider", entry->provider->name()},
             {"mode", analysis_mode_name(s.spec.mode)},
             {"entries", s.corpus ? s.corpus->size() : 0}};
    if (s.error) {
      json e{{"stage", stage_name(s.error->stage)},
             {"code", s.error->code},
             {"message", redact(s.error->message, s.provider_config.api_key)}};
      e["category"] = s.error->category ? json(error_category_name(*s.error->category)) : json(nullptr);
      out["error"] = std::move(e);
    }
    send_json(res, 200, out);
  });

  const auto done_entry = [this](const httplib::Request& req, httplib::Response& res,
                                 bool allow_failed = false) -> std::shared_ptr<Entry> {
    auto entry = find(req.matches[1]);
    if (!entry) {
      send_error(res, 404, "NotFound", "unknown or expired session");
      return nullptr;
    }
    std::lock_guard<std::mutex> lock(entry->mu);
    const bool finished = entry->status == SessionStatus::kDone ||
                          (allow_failed && entry->status == SessionStatus::kFailed);
    if (!finished) {
      send_error(res, 409, "NotDone",
                 "session status is " + std::string(session_status_name(entry->status)));
      return nullptr;
    }
    return entry;
  };

  srv.Get(R"(/api/sessions/([^/]+)/results)",
          [done_entry](const httplib::Request& req, httplib::Response& res) {
            auto entry = done_entry(req, res);
            if (!entry) return;
            std::lock_guard<std::mutex> lock(entry->mu);
            send_json(res, 200, results_json(entry->session));
          });
  srv.Get(R"(/api/sessions/([^/]+)/export\.csv)",
          [done_entry](const httplib::Request& req, httplib::Response& res) {
            auto entry = done_entry(req, res);
            if (!entry) return;
            std::lock_guard<std::mutex> lock(entry->mu);
            res.set_content(export_csv(entry->session.result), "text/csv; charset=utf-8");
          });
  srv.Get(R"(/api/sessions/([^/]+)/log\.txt)",
          [done_entry](const httplib::Request& req, httplib::Response& res) {
            auto entry = done_entry(req, res, true);
            if (!entry) return;
            std::lock_guard<std::mutex> lock(entry->mu);
            LogOptions lo;
            lo.reproducible = entry->reproducible;
            res.set_content(export_log(entry->session, lo), "text/plain; charset=utf-8");
          });
}

}  // namespace qualcode
