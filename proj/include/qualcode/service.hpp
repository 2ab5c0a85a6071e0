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

#ifndef QUALCODE_SERVICE_HPP_
#define QUALCODE_SERVICE_HPP_

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "qualcode/chunker.hpp"
#include "qualcode/llm_client.hpp"

namespace httplib {
class Server;
}

namespace qualcode {

enum class SessionStatus { kConfigured, kRunning, kDone, kFailed };
std::string_view session_status_name(SessionStatus status);

struct ServiceOptions {
  std::chrono::steady_clock::duration ttl = std::chrono::hours(2);
  // Time source for expiry; steady_clock::now when empty.
  std::function<std::chrono::steady_clock::time_point()> clock;
  // Provider for non-mock sessions; the HTTP provider when empty.
  std::function<std::shared_ptr<Provider>()> make_provider;
  TokenBudget budget;
  // Passed to every client; a null sleeper sleeps for real.
  LlmClient::Options client_options;
};

// JSON API over HTTP:
//   POST /api/sessions                 provider config -> 201 {id}
//   POST /api/sessions/{id}/corpus     multipart upload -> {entries, skipped, roles}
//   POST /api/sessions/{id}/run        prompt spec -> 202
//   GET  /api/sessions/{id}            status and chunk progress
//   GET  /api/sessions/{id}/results    findings and grounding
//   GET  /api/sessions/{id}/export.csv
//   GET  /api/sessions/{id}/log.txt
// Sessions are kept in memory and dropped once idle for longer than the TTL.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Blocks until stop().
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it (or -1); then call listen_after_bind.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  // Blocks until the server accepts connections.
  void wait_until_ready() const;

  // Live sessions after dropping expired ones.
  std::size_t session_count();
  // Waits for background runs to finish.
  void join_runs();

  struct Entry;

 private:
  void install_routes();
  std::shared_ptr<Entry> find(const std::string& id);
  void sweep();
  std::chrono::steady_clock::time_point now() const;

  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex workers_mu_;
  std::vector<std::thread> workers_;
};

}  // namespace qualcode

#endif  // QUALCODE_SERVICE_HPP_
