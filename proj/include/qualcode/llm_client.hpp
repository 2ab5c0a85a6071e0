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

#ifndef QUALCODE_LLM_CLIENT_HPP_
#define QUALCODE_LLM_CLIENT_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qualcode/chat.hpp"
#include "qualcode/error.hpp"
#include "qualcode/prompt_engine.hpp"

namespace qualcode {

// Connection settings for an OpenAI-style chat-completions endpoint. The key
// lives in memory only; nothing in the library writes it out.
struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4";
  std::string api_key;
  double temperature = 0.0;
  std::chrono::milliseconds timeout{60'000};
  int max_retries = 3;

  // Throws kInvalidConfig for temperature outside [0, 2], negative retries,
  // a non-positive timeout or an empty model.
  void validate() const;
};

// QUALI_API_KEY, or empty.
std::string api_key_from_env();

// Returns `s` with every occurrence of `secret` replaced by "REDACTED".
std::string redact(std::string s, const std::string& secret);

enum class ErrorCategory { kNetwork, kOutOfLimits, kPolicyViolation, kDataHandling };
std::string_view error_category_name(ErrorCategory category);

class ClientError : public Error {
 public:
  ClientError(ErrorCategory category, std::string detail, bool retryable,
              int http_status = 0)
      : Error(ErrorCode::kClientError,
              std::string(error_category_name(category)) + ": " + detail),
        category_(category),
        detail_(std::move(detail)),
        retryable_(retryable),
        http_status_(http_status) {}

  ErrorCategory category() const noexcept { return category_; }
  const std::string& category_detail() const noexcept { return detail_; }
  bool retryable() const noexcept { return retryable_; }
  int http_status() const noexcept { return http_status_; }

  int attempts() const noexcept { return attempts_; }
  void set_attempts(int n) noexcept { attempts_ = n; }
  std::optional<std::size_t> chunk_index() const noexcept { return chunk_index_; }
  void set_chunk_index(std::size_t k) noexcept { chunk_index_ = k; }

 private:
  ErrorCategory category_;
  std::string detail_;
  bool retryable_;
  int http_status_;
  int attempts_ = 0;
  std::optional<std::size_t> chunk_index_;
};

struct TokenUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  long long total_tokens = 0;
};

// One wire attempt.
struct TranscriptRecord {
  std::vector<ChatMessage> request;
  std::string response;  // assistant text on success, raw body otherwise
  std::optional<std::string> error;  // "<Category>: detail" for failed attempts
  std::chrono::system_clock::time_point timestamp;
  std::chrono::nanoseconds latency{0};
  std::optional<TokenUsage> usage;
  int attempt = 1;
  int http_status = 0;
  std::optional<std::size_t> chunk_index;
};

// Append-only, chronologically ordered log of wire attempts. Appends are
// serialized so independent chunk requests may share one transcript.
class Transcript {
 public:
  Transcript() = default;
  Transcript(const Transcript& other);
  Transcript& operator=(const Transcript& other);

  void append(TranscriptRecord record);
  std::vector<TranscriptRecord> records() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

 private:
  mutable std::mutex mu_;
  std::vector<TranscriptRecord> records_;
};

// Raw HTTP exchange, so that fault injection and the mock exercise the same
// classification path as the real endpoint.
struct WireRequest {
  std::string url;   // {base_url}/chat/completions
  std::string body;  // JSON {model, messages, temperature}
};

struct WireResponse {
  enum class Transport { kOk, kTimeout, kConnectFailed, kOther };
  Transport transport = Transport::kOk;
  int status = 0;
  std::string body;
  std::string transport_detail;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual WireResponse post(const WireRequest& request, const ProviderConfig& config) = 0;
  // Whether post() may be called from several threads at once.
  virtual bool supports_concurrency() const { return false; }
  virtual std::string name() const = 0;
};

// HTTP(S) provider backed by cpp-httplib; sends `Authorization: Bearer <key>`.
std::shared_ptr<Provider> make_http_provider();

struct RetryPolicy {
  std::chrono::milliseconds base_delay{1000};
  double multiplier = 2.0;
  double jitter = 0.2;  // uniform in [-jitter, +jitter] of the nominal delay
  std::chrono::milliseconds max_delay{60'000};
  std::optional<std::uint64_t> jitter_seed;

  // Nominal delay before retry `retry` (1-based), without jitter.
  std::chrono::milliseconds nominal_delay(int retry) const;
};

// Substring rules (matched case-insensitively) for classifying error bodies.
struct ErrorRules {
  std::vector<std::string> rate_limit = {"rate limit", "rate_limit", "too many requests"};
  std::vector<std::string> context_length = {"maximum context length",
                                             "context_length_exceeded",
                                             "context length"};
  std::vector<std::string> policy = {"content management policy", "content_filter",
                                     "content_policy", "content policy"};
};

struct Completion {
  std::string text;
  int attempts = 1;
  std::optional<TokenUsage> usage;
};

// Classifies one wire response: the assistant text on success, otherwise a
// ClientError. Exposed for tests.
struct Classified {
  std::optional<Completion> completion;
  std::optional<ClientError> error;
};
Classified classify_response(const WireResponse& response, const ErrorRules& rules);

std::string build_request_body(std::span<const ChatMessage> messages,
                               const ProviderConfig& config);

using Sleeper = std::function<void(std::chrono::milliseconds)>;
using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

struct ChunkedOptions {
  // Send every chunk with only the preamble instead of chaining the
  // conversation. Intended for deductive coding, where chunks are
  // independent; requests run concurrently when the provider allows it.
  bool independent = false;
  std::size_t max_parallel = 4;
  ProgressFn on_progress;
};

class LlmClient {
 public:
  struct Options {
    RetryPolicy retry;
    ErrorRules rules;
    Sleeper sleeper;  // defaults to std::this_thread::sleep_for
  };

  LlmClient(std::shared_ptr<Provider> provider, ProviderConfig config);
  LlmClient(std::shared_ptr<Provider> provider, ProviderConfig config, Options options);

  // Sends one request, retrying Network and rate-limit failures with
  // exponential backoff. Every attempt appends one transcript record.
  Completion complete(std::span<const ChatMessage> messages, Transcript& transcript,
                      std::optional<std::size_t> chunk_index = std::nullopt) const;

  // Preamble + chunk 0, then for each later chunk the previous assistant reply
  // and the continuation message. Responses come back in chunk order. The
  // first non-retryable failure is rethrown with its chunk index set.
  std::vector<std::string> run_chunked(const PromptBundle& bundle, Transcript& transcript,
                                       const ChunkedOptions& options = {}) const;

  const ProviderConfig& config() const { return config_; }
  const Provider& provider() const { return *provider_; }

 private:
  std::shared_ptr<Provider> provider_;
  ProviderConfig config_;
  Options options_;
};

}  // namespace qualcode

#endif  // QUALCODE_LLM_CLIENT_HPP_
