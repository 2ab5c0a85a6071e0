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

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "qualcode/cli.hpp"
#include "qualcode/corpus.hpp"
#include "test_util.hpp"

namespace qualcode {
namespace {

using json = nlohmann::json;
using testing::kSentinelKey;

class Harness {
 public:
  explicit Harness(ServiceOptions options = {}) : service_(prepare(std::move(options))) {
    port_ = service_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { service_.listen_after_bind(); });
    service_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(30, 0);
  }
  ~Harness() {
    service_.stop();
    thread_.join();
  }

  httplib::Client& http() { return *client_; }
  Service& service() { return service_; }
  std::chrono::steady_clock::duration& offset() { return offset_; }

  std::string create(json body = {{"mock", true}, {"api_key", std::string(kSentinelKey)}}) {
    auto r = client_->Post("/api/sessions", body.dump(), "application/json");
    EXPECT_EQ(r->status, 201) << r->body;
    return json::parse(r->body)["id"].get<std::string>();
  }

  httplib::Result upload(const std::string& id, const std::string& bytes,
                         const std::string& filename, httplib::MultipartFormDataItems extra = {}) {
    extra.push_back({"file", bytes, filename, "application/octet-stream"});
    return client_->Post("/api/sessions/" + id + "/corpus", extra);
  }

  json wait_finished(const std::string& id) {
    for (int i = 0; i < 3000; ++i) {
      auto r = client_->Get("/api/sessions/" + id);
      json j = json::parse(r->body);
      if (j["status"] != "Running") return j;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ADD_FAILURE() << "run did not finish";
    return {};
  }

 private:
  ServiceOptions prepare(ServiceOptions o) {
    if (!o.clock) {
      o.clock = [this] { return std::chrono::steady_clock::now() + offset_; };
    }
    o.client_options.sleeper = [](std::chrono::milliseconds) {};
    o.client_options.retry.jitter_seed = 1;
    return o;
  }

  std::chrono::steady_clock::duration offset_{0};
  Service service_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST(Service, ThematicRunEndToEnd) {
  Harness h;
  const std::string id = h.create({{"mock", true}, {"seed", 7}, {"reproducible", true},
                                   {"api_key", std::string(kSentinelKey)}});
  auto up = h.upload(id, testing::read_data("sample_focus_group.csv"), "sample_focus_group.csv",
                     {{"speaker_column", "speaker", "", ""}});
  ASSERT_EQ(up->status, 200) << up->body;
  const json uj = json::parse(up->body);
  EXPECT_EQ(uj["entries"], 295);
  EXPECT_EQ(uj["skipped"], 0);

  const json spec = {{"mode", "thematic"}, {"n_themes", 20}, {"role_play", true},
                     {"data_type", "focus-group"}};
  auto run = h.http().Post("/api/sessions/" + id + "/run", spec.dump(), "application/json");
  ASSERT_EQ(run->status, 202) << run->body;
  const json status = h.wait_finished(id);
  EXPECT_EQ(status["status"], "Done") << status.dump();
  EXPECT_EQ(status["progress"]["done"], status["progress"]["total"]);

  auto results = h.http().Get("/api/sessions/" + id + "/results");
  ASSERT_EQ(results->status, 200);
  const json rj = json::parse(results->body);
  EXPECT_EQ(rj["themes"].size(), 20u);
  EXPECT_EQ(rj["hallucination_rate"], 0.0);

  auto csv = h.http().Get("/api/sessions/" + id + "/export.csv");
  ASSERT_EQ(csv->status, 200);
  auto log = h.http().Get("/api/sessions/" + id + "/log.txt");
  ASSERT_EQ(log->status, 200);
  EXPECT_NE(log->body.find("=== GROUNDING ==="), std::string::npos);

  // Same bytes as the command-line tool for the same inputs.
  testing::TempDir dir;
  std::ostringstream out, err;
  const int code = run_cli({"analyze", (testing::data_dir() / "sample_focus_group.csv").string(),
                            "--speaker-column", "speaker", "--type", "focus-group", "--role-play",
                            "--themes", "20", "--mock", "--seed", "7", "--reproducible", "--out",
                            dir.file("t.csv").string(), "--log", dir.file("t.log").string()},
                           out, err, [](const char*) -> const char* { return nullptr; });
  ASSERT_EQ(code, kExitOk) << err.str();
  EXPECT_EQ(csv->body, read_file(dir.file("t.csv")));

  for (const auto& body : {up->body, run->body, results->body, csv->body, log->body}) {
    EXPECT_FALSE(testing::contains_sentinel(body));
  }
}

TEST(Service, ErrorStatuses) {
  Harness h;
  EXPECT_EQ(h.http().Post("/api/sessions", "{not json", "application/json")->status, 400);
  EXPECT_EQ(h.http().Post("/api/sessions", json{{"model", ""}}.dump(), "application/json")->status,
            400);
  EXPECT_EQ(h.http().Get("/api/sessions/nope")->status, 404);
  EXPECT_EQ(h.http().Get("/api/sessions/nope/results")->status, 404);

  const std::string id = h.create();
  auto no_corpus = h.http().Post("/api/sessions/" + id + "/run", "{}", "application/json");
  EXPECT_EQ(no_corpus->status, 409);
  EXPECT_EQ(json::parse(no_corpus->body)["error"], "NoCorpus");
  EXPECT_EQ(h.http().Get("/api/sessions/" + id + "/results")->status, 409);

  auto bad = h.upload(id, "speaker,words\nA,hi\n", "bad.csv");
  EXPECT_EQ(bad->status, 422);
  EXPECT_EQ(json::parse(bad->body)["error"], "MissingColumn");

  ASSERT_EQ(h.upload(id, testing::read_data("social_posts_200.csv"), "posts.csv")->status, 200);
  auto missing_cb = h.http().Post("/api/sessions/" + id + "/run",
                                  json{{"mode", "deductive"}}.dump(), "application/json");
  EXPECT_EQ(missing_cb->status, 422);
  EXPECT_EQ(json::parse(missing_cb->body)["error"], "MissingCodebook");
}

TEST(Service, DeductiveRunWithCodebookCsv) {
  Harness h;
  const std::string id = h.create();
  ASSERT_EQ(h.upload(id, testing::read_data("social_posts_200.csv"), "posts.csv")->status, 200);
  const json spec = {{"mode", "deductive"},
                     {"codebook_csv", testing::read_data("codebook_54.csv")},
                     {"prior_examples_csv", testing::read_data("prior_examples_50.csv")}};
  ASSERT_EQ(h.http().Post("/api/sessions/" + id + "/run", spec.dump(), "application/json")->status,
            202);
  EXPECT_EQ(h.wait_finished(id)["status"], "Done");
  const json rj = json::parse(h.http().Get("/api/sessions/" + id + "/results")->body);
  EXPECT_EQ(rj["assignments"].size(), 200u);
  EXPECT_TRUE(rj["hallucination_rate"].is_null());
}

TEST(Service, FailedRunReportsStage) {
  Harness h;
  const std::string id = h.create({{"mock", true}, {"mock_fault", "rate-limit"},
                                   {"api_key", std::string(kSentinelKey)}});
  ASSERT_EQ(h.upload(id, testing::read_data("sample_focus_group.csv"), "s.csv")->status, 200);
  ASSERT_EQ(h.http().Post("/api/sessions/" + id + "/run", "{}", "application/json")->status, 202);
  const json st = h.wait_finished(id);
  EXPECT_EQ(st["status"], "Failed");
  EXPECT_EQ(st["error"]["stage"], "llm");
  EXPECT_EQ(st["error"]["category"], "OutOfLimits");
  EXPECT_FALSE(testing::contains_sentinel(st.dump()));
  EXPECT_EQ(h.http().Get("/api/sessions/" + id + "/export.csv")->status, 409);
}

TEST(Service, IdleSessionsExpire) {
  ServiceOptions o;
  o.ttl = std::chrono::minutes(10);
  Harness h(o);
  const std::string id = h.create();
  EXPECT_EQ(h.service().session_count(), 1u);
  h.offset() = std::chrono::minutes(5);
  EXPECT_EQ(h.http().Get("/api/sessions/" + id)->status, 200);
  h.offset() = std::chrono::minutes(14);
  EXPECT_EQ(h.http().Get("/api/sessions/" + id)->status, 200);
  h.offset() = std::chrono::minutes(30);
  EXPECT_EQ(h.http().Get("/api/sessions/" + id)->status, 404);
  EXPECT_EQ(h.service().session_count(), 0u);
}

TEST(Service, NonMockUsesInjectedProvider) {
  ServiceOptions o;
  std::atomic<int> made{0};
  o.make_provider = [&made] {
    ++made;
    return std::make_shared<testing::ScriptedProvider>(
        std::vector<WireResponse>{{WireResponse::Transport::kOk, 401,
                                   "{\"error\":{\"message\":\"bad key " +
                                       std::string(kSentinelKey) + "\"}}",
                                   ""}});
  };
  Harness h(o);
  const std::string id =
      h.create({{"model", "gpt-4"}, {"api_key", std::string(kSentinelKey)}});
  EXPECT_EQ(made.load(), 1);
  ASSERT_EQ(h.upload(id, "hello world\nsecond line\n", "x.txt")->status, 200);
  ASSERT_EQ(h.http().Post("/api/sessions/" + id + "/run", "{}", "application/json")->status, 202);
  const json st = h.wait_finished(id);
  EXPECT_EQ(st["status"], "Failed");
  EXPECT_FALSE(testing::contains_sentinel(st.dump()));
  EXPECT_FALSE(testing::contains_sentinel(h.http().Get("/api/sessions/" + id + "/log.txt")->body));
}

}  // namespace
}  // namespace qualcode
