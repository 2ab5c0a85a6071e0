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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails.

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kappa_oracle.hpp"
#include "properties.hpp"
#include "qualcode/agreement.hpp"
#include "qualcode/chunker.hpp"
#include "qualcode/cli.hpp"
#include "qualcode/error.hpp"
#include "qualcode/llm_client.hpp"
#include "qualcode/mock_provider.hpp"
#include "qualcode/response_parser.hpp"
#include "qualcode/service.hpp"
#include "qualcode/session.hpp"
#include "test_util.hpp"

namespace qualcode::acceptance {
namespace {

using json = nlohmann::json;
using testing::kSentinelKey;
using Clock = std::chrono::steady_clock;

// Tolerances and limits.
constexpr double kOracleTolerance = 1e-9;
constexpr double kKappaRuntimeLimitS = 10.0;
constexpr double kChunkerRuntimeLimitS = 5.0;
constexpr double kEndToEndLimitS = 5.0;
constexpr double kGroundingTolerance = 0.0;

struct Verdict {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct CliOutcome {
  int code = -1;
  std::string out, err;
};

CliOutcome cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const std::string key(kSentinelKey);
  const int code = run_cli(args, out, err, [&key](const char* name) -> const char* {
    return std::string(name) == "QUALI_API_KEY" ? key.c_str() : nullptr;
  });
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return (testing::data_dir() / name).string(); }

std::vector<std::string> thematic_args(const testing::TempDir& dir) {
  return {"analyze", data("sample_focus_group.csv"), "--speaker-column", "speaker",
          "--type", "focus-group", "--role-play", "--themes", "20", "--mock",
          "--seed", "7", "--reproducible", "--out", dir.file("themes.csv").string(),
          "--log", dir.file("run.log").string()};
}

// Every byte produced while checking key secrecy.
std::vector<std::string>& observed_bytes() {
  static std::vector<std::string> v;
  return v;
}
void observe(std::string s) { observed_bytes().push_back(std::move(s)); }

// ---------------------------------------------------------------------------

Verdict kappa_oracle_equivalence() {
  Verdict v;
  const auto start = Clock::now();
  {
    std::vector<Label> a, b;
    const auto add = [&](const char* x, const char* y, int n) {
      for (int i = 0; i < n; ++i) {
        a.push_back(x);
        b.push_back(y);
      }
    };
    add("yes", "yes", 20);
    add("no", "no", 20);
    add("yes", "no", 5);
    add("no", "yes", 5);
    const auto r = cohen_kappa(PairedLabels::from_vectors(a, b));
    if (!(r.exact == Ratio{3, 5})) {
      v.fail("cohen fixture " + std::to_string(r.exact.num) + "/" + std::to_string(r.exact.den));
    }
    const auto f = fleiss_kappa(MultiRaterMatrix{{{"A", "A", "A"}, {"A", "A", "B"}, {"B", "B", "B"}}});
    if (!(f.exact == Ratio{11, 20})) {
      v.fail("fleiss fixture " + std::to_string(f.exact.num) + "/" + std::to_string(f.exact.den));
    }
  }
  testing::Gen g(20261014);
  double worst = 0.0;
  int degenerate = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t items = g.size(1, 25), cats = g.size(1, 5), raters = g.size(2, 5);
    std::vector<std::vector<Label>> runs(raters);
    for (auto& r : runs) {
      for (std::size_t i = 0; i < items; ++i) r.push_back(g.label(cats));
    }
    try {
      const double got = cohen_kappa(PairedLabels::from_vectors(runs[0], runs[1])).value;
      worst = std::max(worst, std::fabs(got - oracle::cohen(runs[0], runs[1])));
    } catch (const Error&) {
      ++degenerate;
    }
    try {
      const auto m = MultiRaterMatrix::from_runs(runs);
      worst = std::max(worst, std::fabs(fleiss_kappa(m).value - oracle::fleiss(m.items)));
    } catch (const Error&) {
      ++degenerate;
    }
  }
  if (degenerate) v.fail(std::to_string(degenerate) + " instances threw");
  if (worst > kOracleTolerance) v.fail("max deviation " + std::to_string(worst));
  const double secs = seconds_since(start);
  if (secs >= kKappaRuntimeLimitS) v.fail("runtime " + fmt(secs) + " s");
  if (v.pass) {
    v.detail = "fixtures 3/5 and 11/20 exact; 1000 instances, max |diff| " +
               fmt(worst, 12) + " <= 1e-9; " + fmt(secs) + " s";
  }
  return v;
}

Verdict band_fidelity() {
  Verdict v;
  const std::vector<std::pair<double, KappaBand>> cases = {{0.73, KappaBand::kSubstantial},
                                                           {0.87, KappaBand::kAlmostPerfect},
                                                           {0.46, KappaBand::kModerate},
                                                           {0.57, KappaBand::kModerate}};
  std::string got;
  for (const auto& [value, band] : cases) {
    const auto b = kappa_band(value);
    got += fmt(value, 2) + "=" + std::string(kappa_band_name(b)) + " ";
    if (b != band) v.fail(fmt(value, 2) + " -> " + std::string(kappa_band_name(b)));
  }
  if (v.pass) v.detail = got;
  return v;
}

Verdict chunker_partition() {
  Verdict v;
  const auto start = Clock::now();
  testing::Gen g(500500);
  std::size_t chunks_seen = 0, oversized = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Corpus c = testing::random_corpus(g);
    const TokenBudget b = testing::random_budget(g);
    const auto chunks = segment(c, b);
    chunks_seen += chunks.size();
    for (const auto& ch : chunks) oversized += ch.oversized;
    const std::string problem = testing::check_partition(c, b, chunks);
    if (!problem.empty()) {
      v.fail("trial " + std::to_string(trial) + ": " + problem);
      break;
    }
  }
  const double secs = seconds_since(start);
  if (secs >= kChunkerRuntimeLimitS) v.fail("runtime " + fmt(secs) + " s");
  if (v.pass) {
    v.detail = "500 corpora, " + std::to_string(chunks_seen) + " chunks (" +
               std::to_string(oversized) + " oversized); " + fmt(secs) + " s";
  }
  return v;
}

Verdict parser_round_trip() {
  Verdict v;
  testing::Gen g(4242);
  for (int trial = 0; trial < 500 && v.pass; ++trial) {
    const ThemeTable t = testing::random_theme_table(g);
    try {
      if (!same_rows(t, parse_theme_table(render_theme_table(t)))) {
        v.fail("trial " + std::to_string(trial) + " differs after round trip");
      }
    } catch (const Error& e) {
      v.fail("trial " + std::to_string(trial) + ": " + e.what());
    }
  }
  const std::string header =
      "| Theme | Description | Quotes | Participant Count |\n| --- | --- | --- | --- |\n";
  const std::vector<std::pair<std::string, ErrorCode>> malformed = {
      {"The themes are flexibility and isolation.", ErrorCode::kNoTableFound},
      {header + "| Flexibility | hours | \"q\" |\n", ErrorCode::kRowArity},
      {header + "| Flexibility | hours | \"q\" | many |\n", ErrorCode::kBadCount},
  };
  for (const auto& [text, expected] : malformed) {
    try {
      parse_theme_table(text);
      v.fail(std::string(error_code_name(expected)) + " input parsed");
    } catch (const Error& e) {
      if (e.code() != expected) {
        v.fail("expected " + std::string(error_code_name(expected)) + ", got " +
               std::string(e.name()));
      }
    }
  }
  if (v.pass) v.detail = "500 tables equal after round trip; NoTableFound, RowArity, BadCount raised";
  return v;
}

Verdict mock_end_to_end() {
  Verdict v;
  testing::TempDir a, b;
  const auto start = Clock::now();
  const auto first = cli(thematic_args(a));
  const double secs = seconds_since(start);
  const auto second = cli(thematic_args(b));
  observe(first.out + first.err + second.out + second.err);
  if (first.code != kExitOk || second.code != kExitOk) {
    v.fail("exit " + std::to_string(first.code) + ": " + first.err);
    return v;
  }
  if (first.out.rfind("themes\t20\n", 0) != 0) v.fail("theme count line: " + first.out.substr(0, 20));
  if (first.out.find("hallucination_rate\t0.0000\n") == std::string::npos) {
    v.fail("hallucination rate not zero");
  }
  const std::string csv_a = read_file(a.file("themes.csv")), csv_b = read_file(b.file("themes.csv"));
  const std::string log_a = read_file(a.file("run.log")), log_b = read_file(b.file("run.log"));
  observe(csv_a);
  observe(log_a);
  if (std::count(csv_a.begin(), csv_a.end(), '\n') != 21) v.fail("CSV does not hold 20 rows");
  if (csv_a != csv_b) v.fail("CSV bytes differ between runs");
  if (log_a != log_b) v.fail("log bytes differ between runs");
  if (secs >= kEndToEndLimitS) v.fail("wall time " + fmt(secs) + " s");
  const Corpus c = testing::sample_corpus();
  std::size_t words = 0;
  for (const auto& e : c.entries()) {
    std::istringstream in(e.text);
    std::string w;
    while (in >> w) ++words;
  }
  if (v.pass) {
    v.detail = std::to_string(c.size()) + " entries / " + std::to_string(words) +
               " words; 20 themes, hallucination_rate 0, CSV+log byte-identical; " + fmt(secs) +
               " s wall (live-API reference figure 96.5 s, not asserted)";
  }
  return v;
}

Verdict grounding_sensitivity() {
  Verdict v;
  testing::Gen g(5050);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = g.size(1, 60);
    const std::size_t k = g.size(0, m);
    const auto gc = testing::grounding_case(g, m, k);
    const auto r = ground_quotes(gc.table, gc.corpus);
    const double expected = static_cast<double>(k) / static_cast<double>(m);
    worst = std::max(worst, std::fabs(r.hallucination_rate - expected));
    if (r.total != m || r.unmatched != k) {
      v.fail("trial " + std::to_string(trial) + ": " + std::to_string(r.unmatched) + "/" +
             std::to_string(r.total) + " for k=" + std::to_string(k) + " m=" + std::to_string(m));
      break;
    }
  }
  if (worst > kGroundingTolerance) v.fail("rate deviates by " + std::to_string(worst));
  if (v.pass) v.detail = "50 random (k, m): rate == k/m exactly";
  return v;
}

Verdict error_taxonomy() {
  Verdict v;
  struct Case {
    Fault fault;
    ErrorCategory category;
    int max_retries;
  };
  const std::vector<Case> cases = {{Fault::kTimeout, ErrorCategory::kNetwork, 3},
                                   {Fault::kRateLimit, ErrorCategory::kOutOfLimits, 3},
                                   {Fault::kContextLength, ErrorCategory::kOutOfLimits, 0},
                                   {Fault::kPolicyViolation, ErrorCategory::kPolicyViolation, 0},
                                   {Fault::kMalformedBody, ErrorCategory::kDataHandling, 0}};
  std::string summary;
  for (const auto& c : cases) {
    auto provider = std::make_shared<FaultInjectingProvider>(make_mock_provider(),
                                                             std::vector<Fault>{}, c.fault);
    ProviderConfig pc;
    pc.model = "mock";
    pc.api_key = std::string(kSentinelKey);
    LlmClient::Options o;
    o.sleeper = [](std::chrono::milliseconds) {};
    o.retry.jitter_seed = 1;
    LlmClient client(provider, pc, o);
    Transcript t;
    const std::vector<ChatMessage> msgs = {{ChatRole::kUser, "[0] hello"}};
    try {
      client.complete(msgs, t, 0);
      v.fail(std::string(fault_name(c.fault)) + " succeeded");
    } catch (const ClientError& e) {
      observe(e.what());
      const int retries = e.attempts() - 1;
      summary += std::string(fault_name(c.fault)) + "->" +
                 std::string(error_category_name(e.category())) + "/" + std::to_string(retries) +
                 " ";
      if (e.category() != c.category) {
        v.fail(std::string(fault_name(c.fault)) + " classified " +
               std::string(error_category_name(e.category())));
      }
      if (retries > c.max_retries) {
        v.fail(std::string(fault_name(c.fault)) + " retried " + std::to_string(retries));
      }
      if (provider->calls() != static_cast<std::size_t>(e.attempts())) {
        v.fail("call count mismatch for " + std::string(fault_name(c.fault)));
      }
    }
  }
  if (v.pass) v.detail = "fault->category/retries: " + summary;
  return v;
}

// Runs the CLI and the service through success and failure paths with the
// sentinel key configured and scans every byte they produce.
Verdict key_secrecy() {
  Verdict v;
  testing::TempDir dir;
  const auto path = [&dir](const char* n) { return dir.file(n).string(); };
  const std::vector<std::vector<std::string>> runs = {
      {"analyze", data("sample_focus_group.csv"), "--speaker-column", "speaker", "--mock",
       "--out", path("a.csv"), "--log", path("a.log")},
      {"analyze", data("sample_focus_group.csv"), "--mock", "--mock-fault", "timeout",
       "--retry-delay-ms", "0", "--log", path("b.log")},
      {"analyze", data("sample_focus_group.csv"), "--mock", "--mock-fault", "policy", "--log",
       path("c.log")},
      {"code", data("social_posts_200.csv"), "--mode", "deductive", "--codebook",
       data("codebook_54.csv"), "--runs", "3", "--mock", "--out", path("d.csv"), "--log",
       path("d.log")},
      {"code", data("social_posts_200.csv"), "--mock", "--out", path("e.csv"), "--log",
       path("e.log")},
      {"analyze", "x.csv", "--show-config"},
      {"analyze", "/nonexistent.csv", "--mock"},
  };
  std::size_t scanned = 0;
  for (const auto& args : runs) {
    const auto o = cli(args);
    observe(o.out + o.err);
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
    observe(read_file(entry.path()));
  }

  ServiceOptions so;
  so.client_options.sleeper = [](std::chrono::milliseconds) {};
  so.make_provider = [] {
    return std::make_shared<testing::ScriptedProvider>(std::vector<WireResponse>{
        {WireResponse::Transport::kOk, 401,
         "{\"error\":{\"message\":\"Incorrect API key provided: " + std::string(kSentinelKey) +
             "\"}}",
         ""}});
  };
  Service service(so);
  const int port = service.bind_to_any_port("127.0.0.1");
  std::thread server([&service] { service.listen_after_bind(); });
  service.wait_until_ready();
  {
    httplib::Client http("127.0.0.1", port);
    http.set_read_timeout(30, 0);
    const auto record = [](const httplib::Result& r) {
      if (r) observe(r->body);
    };
    for (const json& create :
         {json{{"mock", true}, {"api_key", std::string(kSentinelKey)}},
          json{{"model", "gpt-4"}, {"api_key", std::string(kSentinelKey)}},
          json{{"mock", true}, {"mock_fault", "bogus"}, {"api_key", std::string(kSentinelKey)}}}) {
      auto r = http.Post("/api/sessions", create.dump(), "application/json");
      record(r);
      if (!r || r->status != 201) continue;
      const std::string id = json::parse(r->body)["id"];
      httplib::MultipartFormDataItems items = {
          {"file", testing::read_data("sample_focus_group.csv"), "s.csv", "text/csv"},
          {"speaker_column", "speaker", "", ""}};
      record(http.Post("/api/sessions/" + id + "/corpus", items));
      record(http.Post("/api/sessions/" + id + "/run", "{}", "application/json"));
      for (int i = 0; i < 3000; ++i) {
        auto st = http.Get("/api/sessions/" + id);
        record(st);
        if (st && json::parse(st->body)["status"] != "Running") break;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      for (const char* tail : {"/results", "/export.csv", "/log.txt"}) {
        record(http.Get("/api/sessions/" + id + tail));
      }
    }
  }
  service.stop();
  server.join();

  for (const auto& bytes : observed_bytes()) {
    ++scanned;
    if (testing::contains_sentinel(bytes)) {
      v.fail("sentinel found in output: " + bytes.substr(0, 120));
      break;
    }
  }
  if (v.pass) {
    v.detail = std::to_string(scanned) +
               " outputs scanned (CLI stdout/stderr, CSV exports, logs, service responses)";
  }
  return v;
}

Verdict deductive_determinism() {
  Verdict v;
  PromptSpec spec;
  spec.mode = AnalysisMode::kDeductive;
  spec.data_type = *DataType::parse("social-media");
  spec.codebook = load_codebook_csv(testing::read_data("codebook_54.csv"));
  spec.prior_examples = load_prior_examples_csv(testing::read_data("prior_examples_50.csv"));
  ProviderConfig pc;
  pc.model = "mock";
  pc.api_key = std::string(kSentinelKey);
  Session proto = make_session(spec, pc);
  if (!ingest(proto, testing::read_data("social_posts_200.csv"), "social_posts_200.csv", {})) {
    v.fail("ingest failed: " + proto.error->message);
    return v;
  }
  if (proto.corpus->size() != 200 || spec.codebook->size() != 54) {
    v.fail("fixture sizes " + std::to_string(proto.corpus->size()) + "/" +
           std::to_string(spec.codebook->size()));
  }
  LlmClient client(make_mock_provider(), pc);
  const RunSet set = run_repeated(proto, client, 3);
  for (const auto& r : set.runs) {
    observe(export_log(r));
    if (r.failed()) {
      v.fail("run failed: " + r.error->message);
      return v;
    }
    const auto missing = r.codes()->missing(200);
    if (!missing.empty()) v.fail(std::to_string(missing.size()) + " entries uncoded");
  }
  if (!set.fleiss) {
    v.fail("no Fleiss kappa: " + set.agreement_error.value_or("?"));
  } else if (!(set.fleiss->exact == Ratio{1, 1})) {
    v.fail("Fleiss kappa " + fmt(set.fleiss->value, 4));
  }
  if (v.pass) v.detail = "3 runs x 200 entries x 54 labels: Fleiss kappa 1.0, 200/200 coded each run";
  return v;
}

}  // namespace
}  // namespace qualcode::acceptance

int main() {
  using namespace qualcode::acceptance;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"kappa-oracle-equivalence", kappa_oracle_equivalence},
      {"band-fidelity", band_fidelity},
      {"chunker-partition", chunker_partition},
      {"parser-round-trip", parser_round_trip},
      {"mock-end-to-end", mock_end_to_end},
      {"grounding-sensitivity", grounding_sensitivity},
      {"error-taxonomy", error_taxonomy},
      {"deductive-determinism", deductive_determinism},
      {"key-secrecy", key_secrecy},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << name << ": " << v.detail << std::endl;
    failed += v.pass ? 0 : 1;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
