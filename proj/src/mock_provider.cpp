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

#include "qualcode/mock_provider.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "qualcode/chunker.hpp"
#include "qualcode/text.hpp"

namespace qualcode {

using json = nlohmann::json;

namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "the", "and", "for", "are", "but", "not", "you", "all", "any", "can", "had", "her",
      "was", "one", "our", "out", "day", "get", "has", "him", "his", "how", "man", "new",
      "now", "old", "see", "two", "way", "who", "boy", "did", "its", "let", "put", "say",
      "she", "too", "use", "that", "with", "have", "this", "will", "your", "from", "they",
      "know", "want", "been", "good", "much", "some", "time", "very", "when", "come",
      "here", "just", "like", "long", "make", "many", "more", "only", "over", "such",
      "take", "than", "them", "well", "were", "what", "then", "there", "these", "their",
      "would", "could", "should", "about", "which", "while", "into", "also", "because",
      "being", "where", "after", "before", "other", "those", "really", "think", "thing",
      "things", "lot", "got", "yes", "yeah", "okay", "does", "doing", "done", "each",
      "even", "ever", "every", "most", "must", "need", "said", "same", "still", "sure",
      "though", "through", "under", "until", "upon", "why", "yet", "able", "again",
      "always", "around", "back", "both", "down", "first", "going", "into", "it's",
      "i'm", "don't", "didn't", "can't", "isn't", "wasn't", "i've", "we're", "they're",
      "that's", "there's", "you're", "it", "my", "me", "we", "us", "our", "ours", "myself",
      "off", "own", "per", "via", "may", "might", "something", "anything", "everything",
      "someone", "anyone", "everyone", "maybe", "actually", "quite", "rather", "since",
      "without", "within", "between", "during", "against", "among", "whether", "either",
      "neither", "another", "across", "almost", "already", "although", "became", "become",
      "made", "makes", "making", "feel", "felt", "found", "find", "gave", "give", "goes",
      "went", "came", "keep", "kept", "last", "less", "little", "look", "looking", "mean",
      "next", "often", "once", "part", "seem", "seems", "seemed", "shall", "show", "side",
      "tell", "told", "used", "using", "want", "wanted", "ways", "week", "weeks", "year",
      "years", "hers", "himself", "herself", "itself", "themselves", "ourselves", "whom",
      "whose", "fair", "least", "expect", "honest", "experience", "personally",
      "surprised", "people", "probably", "biggest", "change", "talked", "partner",
      "similar", "honestly", "depends", "figuring", "works", "am", "an", "as", "at", "be", "by", "do", "go", "he", "if", "in", "is",
      "no", "of", "on", "or", "so", "to", "up", "i'd", "i'll", "we've", "let's", "lots",
      "bit", "kind", "sort", "able", "try", "tried", "trying", "started", "start", "able"};
  return kWords;
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

struct PayloadEntry {
  std::size_t index = 0;
  std::optional<std::string> speaker;
  std::string text;
};

std::vector<PayloadEntry> parse_payload(const std::string& message) {
  static const std::regex kLine(R"(^\[(\d+)\] (?:\(([^()]*)\) )?(.*)$)");
  std::vector<PayloadEntry> out;
  for (auto line : text::split_lines(message)) {
    std::string s(line);
    std::smatch m;
    if (!std::regex_match(s, m, kLine)) continue;
    PayloadEntry e;
    e.index = std::stoull(m[1].str());
    if (m[2].matched) e.speaker = m[2].str();
    e.text = m[3].str();
    out.push_back(std::move(e));
  }
  return out;
}

// Token occurrences with byte offsets into `s`.
std::vector<std::pair<std::string, std::size_t>> token_positions(std::string_view s) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_alpha(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && (is_alpha(s[j]) ||
                            (s[j] == '\'' && j + 1 < s.size() && is_alpha(s[j + 1])))) {
      ++j;
    }
    // A token glued to non-ASCII bytes is part of a longer word; skip it.
    const bool glued = (i > 0 && static_cast<unsigned char>(s[i - 1]) >= 0x80) ||
                       (j < s.size() && static_cast<unsigned char>(s[j]) >= 0x80);
    std::string tok = text::to_lower(s.substr(i, j - i));
    if (!glued && tok.size() >= 3 && !stopwords().count(tok)) out.emplace_back(tok, i);
    i = j;
  }
  return out;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string escape_cell(std::string s) {
  text::replace_all(s, "|", "\\|");
  return s;
}

// Verbatim clause of `entry` around byte offset `pos`, bounded by sentence
// punctuation and cell delimiters, then clipped to a word window.
std::string quote_around(const std::string& entry, std::size_t pos, std::size_t token_len) {
  static const std::string kBreaks = ".!?;|\n\r\"";
  std::size_t b = entry.find_last_of(kBreaks, pos == 0 ? 0 : pos - 1);
  b = (b == std::string::npos || b >= pos) ? 0 : b + 1;
  std::size_t e = entry.find_first_of(kBreaks, pos + token_len);
  if (e == std::string::npos) e = entry.size();
  constexpr std::size_t kWindow = 90;
  if (pos > b + kWindow) {
    std::size_t nb = entry.find(' ', pos - kWindow);
    if (nb != std::string::npos && nb < pos) b = nb + 1;
  }
  if (e > pos + token_len + kWindow) {
    std::size_t ne = entry.rfind(' ', pos + token_len + kWindow);
    if (ne != std::string::npos && ne > pos + token_len) e = ne;
  }
  return std::string(text::trim(std::string_view(entry).substr(b, e - b)));
}

std::string theme_table_reply(const std::vector<PayloadEntry>& entries, int n_themes,
                              const MockOptions& options) {
  struct Stat {
    std::size_t mentions = 0;
    std::size_t first_seen = 0;
    std::vector<std::size_t> entries;  // positions into `entries`
  };
  std::unordered_map<std::string, Stat> stats;
  std::size_t order = 0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    for (const auto& [tok, pos] : token_positions(entries[k].text)) {
      auto [it, inserted] = stats.try_emplace(tok);
      if (inserted) it->second.first_seen = order++;
      it->second.mentions += 1;
      if (it->second.entries.empty() || it->second.entries.back() != k) {
        it->second.entries.push_back(k);
      }
    }
  }
  std::vector<std::string> ranked;
  ranked.reserve(stats.size());
  for (const auto& [tok, _] : stats) ranked.push_back(tok);
  std::sort(ranked.begin(), ranked.end(), [&](const std::string& a, const std::string& b) {
    const Stat& sa = stats.at(a);
    const Stat& sb = stats.at(b);
    if (sa.mentions != sb.mentions) return sa.mentions > sb.mentions;
    return sa.first_seen < sb.first_seen;
  });
  if (ranked.size() > static_cast<std::size_t>(n_themes)) ranked.resize(n_themes);

  const bool any_speaker = std::any_of(entries.begin(), entries.end(),
                                       [](const PayloadEntry& e) { return e.speaker.has_value(); });
  const bool by_speaker = options.count_mode == ParticipantCountMode::kDistinctSpeakers ||
                          (options.count_mode == ParticipantCountMode::kAuto && any_speaker);

  static const char* kDescriptions[] = {
      "Participants discuss {t} and what it means for them.",
      "Comments that refer to {t} in some form.",
      "A recurring topic centred on {t}.",
  };
  const std::uint64_t seed_hash = fnv1a(std::to_string(options.seed));

  std::string out = "Below is the thematic analysis of the data provided.\n\n";
  out += "| Theme | Description | Quotes | Participant Count |\n";
  out += "| --- | --- | --- | --- |\n";
  for (const auto& tok : ranked) {
    const Stat& s = stats.at(tok);
    std::size_t participants = s.entries.size();
    if (by_speaker) {
      std::set<std::string> speakers;
      std::size_t unlabeled = 0;
      for (std::size_t k : s.entries) {
        if (entries[k].speaker) {
          speakers.insert(*entries[k].speaker);
        } else {
          ++unlabeled;
        }
      }
      participants = speakers.size() + unlabeled;
    }
    std::vector<std::string> quotes;
    for (std::size_t k : s.entries) {
      if (quotes.size() >= options.quotes_per_theme) break;
      for (const auto& [t2, pos] : token_positions(entries[k].text)) {
        if (t2 != tok) continue;
        std::string q = quote_around(entries[k].text, pos, tok.size());
        if (!q.empty() && std::find(quotes.begin(), quotes.end(), q) == quotes.end()) {
          quotes.push_back(std::move(q));
        }
        break;
      }
    }
    std::string desc = kDescriptions[fnv1a(tok, seed_hash) % 3];
    text::replace_all(desc, "{t}", tok);
    std::vector<std::string> wrapped;
    for (const auto& q : quotes) wrapped.push_back("\"" + escape_cell(q) + "\"");
    out += "| " + tok + " | " + desc + " | " + text::join(wrapped, "; ") + " | " +
           std::to_string(participants) + " |\n";
  }
  out += "\nEach quote is copied verbatim from the data entries.";
  return out;
}

struct ParsedCodebook {
  std::vector<std::pair<int, std::string>> labels;  // id, name
  std::optional<int> irrelevant_id;
  std::optional<int> other_id;
};

ParsedCodebook parse_codebook(const std::string& all_text) {
  static const std::regex kLabel(R"(^(\d+) — (.+)$)");
  static const std::regex kReserved(R"(Use (\d+) when the entry is irrelevant and (\d+) when)");
  ParsedCodebook cb;
  for (auto line : text::split_lines(all_text)) {
    std::string s(line);
    std::smatch m;
    if (!std::regex_match(s, m, kLabel)) continue;
    std::string rest = m[2].str();
    const auto sep = rest.find(" — ");
    if (sep != std::string::npos) rest = rest.substr(0, sep);
    cb.labels.emplace_back(std::stoi(m[1].str()), rest);
  }
  std::smatch m;
  if (std::regex_search(all_text, m, kReserved)) {
    cb.irrelevant_id = std::stoi(m[1].str());
    cb.other_id = std::stoi(m[2].str());
  } else if (!cb.labels.empty()) {
    auto [mn, mx] = std::minmax_element(cb.labels.begin(), cb.labels.end());
    cb.irrelevant_id = mn->first;
    cb.other_id = mx->first;
  }
  return cb;
}

bool contains_phrase(const std::string& haystack_norm, const std::string& phrase_norm) {
  if (phrase_norm.empty()) return false;
  std::size_t pos = 0;
  while ((pos = haystack_norm.find(phrase_norm, pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || !is_alpha(haystack_norm[pos - 1]);
    const std::size_t end = pos + phrase_norm.size();
    const bool right_ok = end >= haystack_norm.size() || !is_alpha(haystack_norm[end]);
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

std::string code_table_reply(const std::vector<PayloadEntry>& entries,
                             const std::optional<ParsedCodebook>& codebook) {
  std::string out = "Here are the codes for the entries in this part.\n\n";
  out += "| Index | Code |\n| --- | --- |\n";
  for (const auto& e : entries) {
    std::string code;
    const auto toks = token_positions(e.text);
    if (codebook) {
      const int irrelevant = codebook->irrelevant_id.value_or(0);
      const int other = codebook->other_id.value_or(0);
      std::optional<int> chosen;
      if (toks.empty()) chosen = irrelevant;
      const std::string norm = text::normalize_for_match(e.text);
      for (const auto& [id, name] : codebook->labels) {
        if (chosen) break;
        if (id == irrelevant || id == other) continue;
        if (contains_phrase(norm, text::normalize_label(name))) chosen = id;
      }
      if (!chosen) {
        std::unordered_set<std::string> present;
        for (const auto& t : toks) present.insert(t.first);
        for (const auto& [id, name] : codebook->labels) {
          if (chosen) break;
          if (id == irrelevant || id == other) continue;
          for (const auto& kw : token_positions(name)) {
            if (kw.first.size() >= 4 && present.count(kw.first)) {
              chosen = id;
              break;
            }
          }
        }
      }
      code = std::to_string(chosen.value_or(other));
    } else {
      std::vector<std::string> words;
      for (const auto& t : toks) {
        if (std::find(words.begin(), words.end(), t.first) == words.end()) words.push_back(t.first);
        if (words.size() == 3) break;
      }
      if (words.empty()) words = {"general", "comment"};
      if (words.size() == 1) words.push_back("mention");
      code = text::join(words, " ");
    }
    out += "| " + std::to_string(e.index) + " | " + code + " |\n";
  }
  return out;
}

class MockProvider final : public Provider {
 public:
  explicit MockProvider(MockOptions options) : options_(options) {}

  WireResponse post(const WireRequest& request, const ProviderConfig& config) override {
    WireResponse out;
    std::vector<ChatMessage> messages;
    try {
      json body = json::parse(request.body);
      for (const auto& m : body.at("messages")) {
        auto role = parse_chat_role(m.at("role").get<std::string>());
        messages.push_back({role.value_or(ChatRole::kUser), m.at("content").get<std::string>()});
      }
    } catch (const json::exception& e) {
      out.status = 400;
      out.body = json{{"error", {{"message", std::string("bad request: ") + e.what()}}}}.dump();
      return out;
    }
    const std::string content = mock_reply(messages, options_);
    long long prompt_tokens = 0;
    for (const auto& m : messages) prompt_tokens += static_cast<long long>(estimate_tokens(m.content));
    const long long completion_tokens = static_cast<long long>(estimate_tokens(content));
    json reply = {
        {"id", "mock-" + std::to_string(fnv1a(request.body, options_.seed) % 1000000007ULL)},
        {"object", "chat.completion"},
        {"model", config.model},
        {"choices",
         json::array({{{"index", 0},
                       {"message", {{"role", "assistant"}, {"content", content}}},
                       {"finish_reason", "stop"}}})},
        {"usage",
         {{"prompt_tokens", prompt_tokens},
          {"completion_tokens", completion_tokens},
          {"total_tokens", prompt_tokens + completion_tokens}}}};
    out.status = 200;
    out.body = reply.dump();
    return out;
  }

  bool supports_concurrency() const override { return true; }
  std::string name() const override { return "mock"; }

 private:
  MockOptions options_;
};

}  // namespace

std::vector<std::string> salient_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (auto& [tok, _] : token_positions(s)) out.push_back(tok);
  return out;
}

std::string mock_reply(const std::vector<ChatMessage>& messages, const MockOptions& options) {
  std::string all;
  std::uint64_t h = fnv1a(std::to_string(options.seed));
  for (const auto& m : messages) {
    all += m.content;
    all += '\n';
    h = fnv1a(chat_role_name(m.role), h);
    h = fnv1a(m.content, h);
  }
  const ChatMessage* last_user = nullptr;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == ChatRole::kUser) {
      last_user = &*it;
      break;
    }
  }
  const auto entries = last_user ? parse_payload(last_user->content) : std::vector<PayloadEntry>{};
  if (entries.empty()) return "Understood. Please send the data to analyze.";

  if (all.find("| Theme | Description | Quotes | Participant Count |") != std::string::npos) {
    static const std::regex kRows(R"(exactly (\d+) rows)");
    std::smatch m;
    int n = 10;
    if (std::regex_search(all, m, kRows)) n = std::max(1, std::stoi(m[1].str()));
    return theme_table_reply(entries, n, options);
  }
  std::optional<ParsedCodebook> cb;
  {
    ParsedCodebook parsed = parse_codebook(all);
    if (!parsed.labels.empty()) cb = std::move(parsed);
  }
  return code_table_reply(entries, cb);
}

std::shared_ptr<Provider> make_mock_provider(MockOptions options) {
  return std::make_shared<MockProvider>(options);
}

// ---------------------------------------------------------------------------

std::optional<Fault> parse_fault(std::string_view name) {
  const std::string n = text::to_lower(name);
  if (n == "none") return Fault::kNone;
  if (n == "timeout" || n == "network") return Fault::kTimeout;
  if (n == "connect") return Fault::kConnectFailed;
  if (n == "server-error" || n == "5xx") return Fault::kServerError;
  if (n == "rate-limit" || n == "429") return Fault::kRateLimit;
  if (n == "context-length" || n == "context") return Fault::kContextLength;
  if (n == "policy" || n == "policy-violation") return Fault::kPolicyViolation;
  if (n == "malformed") return Fault::kMalformedBody;
  if (n == "empty") return Fault::kEmptyBody;
  return std::nullopt;
}

std::string_view fault_name(Fault fault) {
  switch (fault) {
    case Fault::kNone: return "none";
    case Fault::kTimeout: return "timeout";
    case Fault::kConnectFailed: return "connect";
    case Fault::kServerError: return "server-error";
    case Fault::kRateLimit: return "rate-limit";
    case Fault::kContextLength: return "context-length";
    case Fault::kPolicyViolation: return "policy";
    case Fault::kMalformedBody: return "malformed";
    case Fault::kEmptyBody: return "empty";
  }
  return "none";
}

FaultInjectingProvider::FaultInjectingProvider(std::shared_ptr<Provider> inner,
                                               std::vector<Fault> script, Fault after_script)
    : inner_(std::move(inner)), script_(std::move(script)), after_(after_script) {}

WireResponse FaultInjectingProvider::canned(Fault fault) {
  WireResponse r;
  switch (fault) {
    case Fault::kNone:
      break;
    case Fault::kTimeout:
      r.transport = WireResponse::Transport::kTimeout;
      r.transport_detail = "injected timeout";
      break;
    case Fault::kConnectFailed:
      r.transport = WireResponse::Transport::kConnectFailed;
      r.transport_detail = "injected connection refusal";
      break;
    case Fault::kServerError:
      r.status = 503;
      r.body = R"({"error":{"message":"The server is overloaded","type":"server_error"}})";
      break;
    case Fault::kRateLimit:
      r.status = 429;
      r.body = R"({"error":{"message":"Rate limit reached for requests","type":"requests"}})";
      break;
    case Fault::kContextLength:
      r.status = 400;
      r.body =
          R"({"error":{"message":"This model's maximum context length is 8192 tokens.","code":"context_length_exceeded"}})";
      break;
    case Fault::kPolicyViolation:
      r.status = 400;
      r.body =
          R"({"error":{"message":"The response was filtered due to the prompt triggering the content management policy.","code":"content_filter"}})";
      break;
    case Fault::kMalformedBody:
      r.status = 200;
      r.body = "<html>upstream proxy error</html>";
      break;
    case Fault::kEmptyBody:
      r.status = 200;
      break;
  }
  return r;
}

WireResponse FaultInjectingProvider::post(const WireRequest& request,
                                          const ProviderConfig& config) {
  const std::size_t i = calls_.fetch_add(1);
  const Fault f = i < script_.size() ? script_[i] : after_;
  if (f == Fault::kNone) return inner_->post(request, config);
  return canned(f);
}

}  // namespace qualcode
