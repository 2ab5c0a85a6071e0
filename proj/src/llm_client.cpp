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

#include "qualcode/llm_client.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <random>
#include <thread>

#include "json.hpp"
#include "qualcode/text.hpp"

namespace qualcode {

using json = nlohmann::json;

std::string_view chat_role_name(ChatRole role) {
  switch (role) {
    case ChatRole::kSystem: return "system";
    case ChatRole::kUser: return "user";
    case ChatRole::kAssistant: return "assistant";
  }
  return "user";
}

std::optional<ChatRole> parse_chat_role(std::string_view name) {
  if (name == "system") return ChatRole::kSystem;
  if (name == "user") return ChatRole::kUser;
  if (name == "assistant") return ChatRole::kAssistant;
  return std::nullopt;
}

void ProviderConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::kInvalidConfig, "temperature must be within [0, 2]");
  }
  if (max_retries < 0) throw Error(ErrorCode::kInvalidConfig, "max_retries must be >= 0");
  if (timeout.count() <= 0) throw Error(ErrorCode::kInvalidConfig, "timeout must be positive");
  if (text::trim(model).empty()) throw Error(ErrorCode::kInvalidConfig, "model is required");
}

std::string api_key_from_env() {
  const char* v = std::getenv("QUALI_API_KEY");
  return v ? std::string(v) : std::string();
}

std::string redact(std::string s, const std::string& secret) {
  if (!secret.empty()) text::replace_all(s, secret, "REDACTED");
  return s;
}

std::string_view error_category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kNetwork: return "Network";
    case ErrorCategory::kOutOfLimits: return "OutOfLimits";
    case ErrorCategory::kPolicyViolation: return "PolicyViolation";
    case ErrorCategory::kDataHandling: return "DataHandling";
  }
  return "DataHandling";
}

// ---------------------------------------------------------------------------

Transcript::Transcript(const Transcript& other) {
  std::lock_guard lock(other.mu_);
  records_ = other.records_;
}

Transcript& Transcript::operator=(const Transcript& other) {
  if (this == &other) return *this;
  std::vector<TranscriptRecord> copy = other.records();
  std::lock_guard lock(mu_);
  records_ = std::move(copy);
  return *this;
}

void Transcript::append(TranscriptRecord record) {
  std::lock_guard lock(mu_);
  records_.push_back(std::move(record));
}

std::vector<TranscriptRecord> Transcript::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::size_t Transcript::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

// ---------------------------------------------------------------------------

std::chrono::milliseconds RetryPolicy::nominal_delay(int retry) const {
  const double factor = std::pow(multiplier, std::max(0, retry - 1));
  const double ms = std::min(static_cast<double>(base_delay.count()) * factor,
                             static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

namespace {

bool contains_any(const std::string& haystack_lower, const std::vector<std::string>& needles) {
  for (const auto& n : needles) {
    if (!n.empty() && haystack_lower.find(text::to_lower(n)) != std::string::npos) return true;
  }
  return false;
}

std::string error_message_of(const std::string& body) {
  try {
    json j = json::parse(body);
    if (j.is_object() && j.contains("error")) {
      const auto& e = j["error"];
      if (e.is_object() && e.contains("message") && e["message"].is_string()) {
        return e["message"].get<std::string>();
      }
      if (e.is_string()) return e.get<std::string>();
    }
  } catch (const json::exception&) {
  }
  std::string b(text::trim(body));
  if (b.size() > 300) b = b.substr(0, 300) + "...";
  return b;
}

}  // namespace

Classified classify_response(const WireResponse& r, const ErrorRules& rules) {
  using T = WireResponse::Transport;
  Classified out;
  if (r.transport != T::kOk) {
    const char* what = r.transport == T::kTimeout         ? "request timed out"
                       : r.transport == T::kConnectFailed ? "connection failed"
                                                          : "transport error";
    std::string detail = what;
    if (!r.transport_detail.empty()) detail += " (" + r.transport_detail + ")";
    out.error = ClientError(ErrorCategory::kNetwork, detail, true);
    return out;
  }

  const std::string lower = text::to_lower(r.body);
  if (r.status != 200) {
    const std::string msg = error_message_of(r.body);
    const std::string detail = "HTTP " + std::to_string(r.status) + (msg.empty() ? "" : ": " + msg);
    if (contains_any(lower, rules.policy)) {
      out.error = ClientError(ErrorCategory::kPolicyViolation, detail, false, r.status);
    } else if (contains_any(lower, rules.context_length) || r.status == 413) {
      out.error = ClientError(ErrorCategory::kOutOfLimits, detail, false, r.status);
    } else if (r.status == 429 || contains_any(lower, rules.rate_limit)) {
      out.error = ClientError(ErrorCategory::kOutOfLimits, detail, true, r.status);
    } else if (r.status >= 500 || r.status == 408) {
      out.error = ClientError(ErrorCategory::kNetwork, detail, true, r.status);
    } else {
      out.error = ClientError(ErrorCategory::kDataHandling, detail, false, r.status);
    }
    return out;
  }

  json j;
  try {
    j = json::parse(r.body);
  } catch (const json::exception&) {
    out.error = ClientError(ErrorCategory::kDataHandling,
                            r.body.empty() ? "empty response body" : "response body is not JSON",
                            false, r.status);
    return out;
  }
  if (j.is_object() && j.contains("error") && !j["error"].is_null()) {
    // Some gateways report failures with HTTP 200.
    WireResponse as_error = r;
    as_error.status = 400;
    if (contains_any(lower, rules.rate_limit)) as_error.status = 429;
    return classify_response(as_error, rules);
  }
  try {
    const auto& choice = j.at("choices").at(0);
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string() &&
        choice["finish_reason"].get<std::string>() == "content_filter") {
      out.error = ClientError(ErrorCategory::kPolicyViolation,
                              "response withheld by content filter", false, r.status);
      return out;
    }
    const auto& content = choice.at("message").at("content");
    if (!content.is_string() || text::trim(content.get<std::string>()).empty()) {
      out.error = ClientError(ErrorCategory::kDataHandling, "empty assistant content", false,
                              r.status);
      return out;
    }
    Completion c;
    c.text = content.get<std::string>();
    if (j.contains("usage") && j["usage"].is_object()) {
      const auto& u = j["usage"];
      TokenUsage usage;
      usage.prompt_tokens = u.value("prompt_tokens", 0LL);
      usage.completion_tokens = u.value("completion_tokens", 0LL);
      usage.total_tokens = u.value("total_tokens", usage.prompt_tokens + usage.completion_tokens);
      c.usage = usage;
    }
    out.completion = std::move(c);
  } catch (const json::exception&) {
    out.error = ClientError(ErrorCategory::kDataHandling,
                            "response lacks choices[0].message.content", false, r.status);
  }
  return out;
}

std::string build_request_body(std::span<const ChatMessage> messages,
                               const ProviderConfig& config) {
  json body;
  body["model"] = config.model;
  json msgs = json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", std::string(chat_role_name(m.role))}, {"content", m.content}});
  }
  body["messages"] = std::move(msgs);
  body["temperature"] = config.temperature;
  return body.dump();
}

// ---------------------------------------------------------------------------

LlmClient::LlmClient(std::shared_ptr<Provider> provider, ProviderConfig config)
    : LlmClient(std::move(provider), std::move(config), Options{}) {}

LlmClient::LlmClient(std::shared_ptr<Provider> provider, ProviderConfig config, Options options)
    : provider_(std::move(provider)), config_(std::move(config)), options_(std::move(options)) {
  if (!provider_) throw Error(ErrorCode::kInvalidConfig, "provider is required");
  config_.validate();
  if (!options_.sleeper) {
    options_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

Completion LlmClient::complete(std::span<const ChatMessage> messages, Transcript& transcript,
                               std::optional<std::size_t> chunk_index) const {
  if (messages.empty()) {
    throw ClientError(ErrorCategory::kDataHandling, "no messages to send", false);
  }
  for (const auto& m : messages) {
    if (m.content.empty()) {
      throw ClientError(ErrorCategory::kDataHandling, "message content must not be empty", false);
    }
  }
  WireRequest request;
  std::string base = config_.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  request.url = base + "/chat/completions";
  request.body = build_request_body(messages, config_);

  std::mt19937_64 rng(options_.retry.jitter_seed ? *options_.retry.jitter_seed
                                                 : std::random_device{}());
  std::uniform_real_distribution<double> jitter(-options_.retry.jitter, options_.retry.jitter);
  const std::vector<ChatMessage> request_copy(messages.begin(), messages.end());
  const int max_attempts = config_.max_retries + 1;

  for (int attempt = 1;; ++attempt) {
    const auto started_wall = std::chrono::system_clock::now();
    const auto started = std::chrono::steady_clock::now();
    WireResponse response = provider_->post(request, config_);
    const auto latency = std::chrono::steady_clock::now() - started;
    Classified c = classify_response(response, options_.rules);

    TranscriptRecord rec;
    rec.request = request_copy;
    rec.timestamp = started_wall;
    rec.latency = std::chrono::duration_cast<std::chrono::nanoseconds>(latency);
    rec.attempt = attempt;
    rec.http_status = response.status;
    rec.chunk_index = chunk_index;
    if (c.completion) {
      rec.response = redact(c.completion->text, config_.api_key);
      rec.usage = c.completion->usage;
      transcript.append(std::move(rec));
      c.completion->attempts = attempt;
      return std::move(*c.completion);
    }
    ClientError err = *c.error;
    ClientError scrubbed(err.category(), redact(err.category_detail(), config_.api_key),
                         err.retryable(), err.http_status());
    rec.response = redact(response.body, config_.api_key);
    rec.error = std::string(error_category_name(scrubbed.category())) + ": " +
                scrubbed.category_detail();
    transcript.append(std::move(rec));

    if (!scrubbed.retryable() || attempt >= max_attempts) {
      scrubbed.set_attempts(attempt);
      if (chunk_index) scrubbed.set_chunk_index(*chunk_index);
      throw scrubbed;
    }
    const auto nominal = options_.retry.nominal_delay(attempt);
    const auto delay = std::chrono::milliseconds(static_cast<long long>(
        std::llround(static_cast<double>(nominal.count()) * (1.0 + jitter(rng)))));
    options_.sleeper(delay);
  }
}

std::vector<std::string> LlmClient::run_chunked(const PromptBundle& bundle,
                                                Transcript& transcript,
                                                const ChunkedOptions& options) const {
  const std::size_t total = bundle.chunk_messages.size();
  std::vector<std::string> responses;
  responses.reserve(total);

  if (!options.independent) {
    std::vector<ChatMessage> conversation = bundle.preamble_messages();
    for (std::size_t k = 0; k < total; ++k) {
      conversation.push_back({ChatRole::kUser, bundle.chunk_messages[k]});
      Completion c = complete(conversation, transcript, k);
      conversation.push_back({ChatRole::kAssistant, c.text});
      responses.push_back(std::move(c.text));
      if (options.on_progress) options.on_progress(k + 1, total);
    }
    return responses;
  }

  const bool parallel = provider_->supports_concurrency() && options.max_parallel > 1;
  if (!parallel) {
    for (std::size_t k = 0; k < total; ++k) {
      responses.push_back(complete(bundle.standalone_messages(k), transcript, k).text);
      if (options.on_progress) options.on_progress(k + 1, total);
    }
    return responses;
  }

  responses.resize(total);
  std::size_t done = 0;
  for (std::size_t start = 0; start < total; start += options.max_parallel) {
    const std::size_t end = std::min(total, start + options.max_parallel);
    std::vector<std::future<Completion>> wave;
    for (std::size_t k = start; k < end; ++k) {
      wave.push_back(std::async(std::launch::async, [this, &bundle, &transcript, k] {
        return complete(bundle.standalone_messages(k), transcript, k);
      }));
    }
    std::optional<ClientError> first_error;
    for (std::size_t k = start; k < end; ++k) {
      try {
        responses[k] = wave[k - start].get().text;
        ++done;
        if (options.on_progress) options.on_progress(done, total);
      } catch (const ClientError& e) {
        if (!first_error) first_error = e;
      }
    }
    if (first_error) throw *first_error;
  }
  return responses;
}

}  // namespace qualcode
