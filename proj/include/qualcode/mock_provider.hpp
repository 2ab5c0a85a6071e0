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

#ifndef QUALCODE_MOCK_PROVIDER_HPP_
#define QUALCODE_MOCK_PROVIDER_HPP_

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qualcode/llm_client.hpp"

namespace qualcode {

// How the mock fills the Participant Count column.
enum class ParticipantCountMode {
  kEntries,           // entries containing the theme token
  kDistinctSpeakers,  // distinct speakers among those entries; unlabeled entries count once each
  kAuto,              // speakers when the chunk carries any speaker label, else entries
};

struct MockOptions {
  std::uint64_t seed = 0;
  ParticipantCountMode count_mode = ParticipantCountMode::kEntries;
  std::size_t quotes_per_theme = 2;
};

// Offline chat-completions endpoint. It reads the output schema back out of
// the prompt and answers with a well-formed table built from the payload of
// the last user message:
//   theme table  top-n most frequent non-stopword tokens; quotes are verbatim
//                clauses of entries containing the token
//   code table   inductive: the entry's first salient tokens; deductive:
//                codebook label names matched against the entry, falling back
//                to the "other" label
// Replies depend only on (seed, request body).
std::shared_ptr<Provider> make_mock_provider(MockOptions options = {});

// The assistant text the mock returns for `messages`.
std::string mock_reply(const std::vector<ChatMessage>& messages, const MockOptions& options);

// Lower-cased alphabetic tokens of length >= 3 that are not stopwords.
std::vector<std::string> salient_tokens(std::string_view text);

enum class Fault {
  kNone,
  kTimeout,
  kConnectFailed,
  kServerError,      // HTTP 503
  kRateLimit,        // HTTP 429
  kContextLength,    // HTTP 400, maximum context length body
  kPolicyViolation,  // HTTP 400, content management policy body
  kMalformedBody,    // HTTP 200, not JSON
  kEmptyBody,        // HTTP 200, empty body
};

std::optional<Fault> parse_fault(std::string_view name);
std::string_view fault_name(Fault fault);

// Wraps another provider and replaces selected calls with canned failures.
// Call i (0-based, counted across all requests) uses script[i]; calls past
// the end use `after_script`.
class FaultInjectingProvider final : public Provider {
 public:
  FaultInjectingProvider(std::shared_ptr<Provider> inner, std::vector<Fault> script,
                         Fault after_script = Fault::kNone);

  WireResponse post(const WireRequest& request, const ProviderConfig& config) override;
  bool supports_concurrency() const override { return false; }
  std::string name() const override { return "fault-injecting(" + inner_->name() + ")"; }

  std::size_t calls() const { return calls_.load(); }
  // Canned response for a fault (kNone is not valid here).
  static WireResponse canned(Fault fault);

 private:
  std::shared_ptr<Provider> inner_;
  std::vector<Fault> script_;
  Fault after_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace qualcode

#endif  // QUALCODE_MOCK_PROVIDER_HPP_
