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

#include "qualcode/config.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <sstream>

#include "qualcode/error.hpp"
#include "qualcode/text.hpp"

namespace qualcode {

namespace {

long long as_int(std::string_view key, std::string_view value, long long lo, long long hi) {
  const auto v = text::parse_int(value);
  if (!v || *v < lo || *v > hi) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(key) + " expects an integer in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "], got '" + std::string(value) + "'");
  }
  return *v;
}

double as_double(std::string_view key, std::string_view value) {
  const std::string s(text::trim(value));
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(key) + " expects a number, got '" + std::string(value) + "'");
  }
  return v;
}

bool as_bool(std::string_view key, std::string_view value) {
  const std::string v = text::to_lower(text::trim(value));
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::kInvalidConfig,
              std::string(key) + " expects true or false, got '" + std::string(value) + "'");
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string get(const CliConfig& c, const std::string& key) {
  const auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  if (key == "base_url") return c.provider.base_url;
  if (key == "model") return c.provider.model;
  if (key == "api_key") return c.provider.api_key.empty() ? "" : "REDACTED";
  if (key == "temperature") return format_double(c.provider.temperature);
  if (key == "timeout_ms") return std::to_string(c.provider.timeout.count());
  if (key == "max_retries") return std::to_string(c.provider.max_retries);
  if (key == "retry_delay_ms") return std::to_string(c.retry_delay_ms);
  if (key == "max_tokens") return std::to_string(c.budget.max_tokens_per_request);
  if (key == "chars_per_token") return format_double(c.budget.chars_per_token);
  if (key == "prompt_overhead") return std::to_string(c.budget.prompt_overhead_tokens);
  if (key == "data_type") return c.data_type;
  if (key == "n_themes") return std::to_string(c.n_themes);
  if (key == "role_play") return b(c.role_play);
  if (key == "background") return c.background;
  if (key == "instructions") return c.instructions;
  if (key == "mock") return b(c.mock);
  if (key == "seed") return std::to_string(c.seed);
  if (key == "templates") return c.templates_dir;
  if (key == "reproducible") return b(c.reproducible);
  if (key == "host") return c.host;
  if (key == "port") return std::to_string(c.port);
  return "";
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "base_url",     "model",      "api_key",    "temperature",     "timeout_ms",
      "max_retries",  "retry_delay_ms", "max_tokens", "chars_per_token", "prompt_overhead",
      "data_type",    "n_themes",   "role_play",  "background",      "instructions",
      "mock",         "seed",       "templates",  "reproducible",    "host",
      "port"};
  return keys;
}

void apply_setting(CliConfig& c, std::string_view key_in, std::string_view value_in) {
  const std::string key(text::trim(key_in));
  const std::string value(text::trim(value_in));
  if (key == "base_url") {
    c.provider.base_url = value;
  } else if (key == "model") {
    c.provider.model = value;
  } else if (key == "api_key") {
    c.provider.api_key = value;
  } else if (key == "temperature") {
    c.provider.temperature = as_double(key, value);
  } else if (key == "timeout_ms") {
    c.provider.timeout = std::chrono::milliseconds(as_int(key, value, 1, 3'600'000));
  } else if (key == "max_retries") {
    c.provider.max_retries = static_cast<int>(as_int(key, value, 0, 20));
  } else if (key == "retry_delay_ms") {
    c.retry_delay_ms = static_cast<int>(as_int(key, value, 0, 600'000));
  } else if (key == "max_tokens") {
    c.budget.max_tokens_per_request = static_cast<std::size_t>(as_int(key, value, 1, 10'000'000));
  } else if (key == "chars_per_token") {
    c.budget.chars_per_token = as_double(key, value);
  } else if (key == "prompt_overhead") {
    c.budget.prompt_overhead_tokens = static_cast<std::size_t>(as_int(key, value, 0, 10'000'000));
  } else if (key == "data_type") {
    c.data_type = value;
  } else if (key == "n_themes") {
    c.n_themes = static_cast<int>(as_int(key, value, 1, 1000));
  } else if (key == "role_play") {
    c.role_play = as_bool(key, value);
  } else if (key == "background") {
    c.background = value;
  } else if (key == "instructions") {
    c.instructions = value;
  } else if (key == "mock") {
    c.mock = as_bool(key, value);
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(
        as_int(key, value, 0, std::numeric_limits<long long>::max()));
  } else if (key == "templates") {
    c.templates_dir = value;
  } else if (key == "reproducible") {
    c.reproducible = as_bool(key, value);
  } else if (key == "host") {
    c.host = value;
  } else if (key == "port") {
    c.port = static_cast<int>(as_int(key, value, 0, 65535));
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown setting '" + key + "'");
  }
}

void apply_config_file(CliConfig& config, std::string_view contents) {
  const auto lines = text::split_lines(text::strip_bom(contents));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  "config line " + std::to_string(i + 1) + " is not key = value");
    }
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidConfig,
                  "config line " + std::to_string(i + 1) + ": " + e.detail());
    }
  }
}

void apply_env(CliConfig& config, const EnvLookup& lookup) {
  for (const auto& key : config_keys()) {
    std::string name = "QUALI_";
    for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const char* v = lookup(name.c_str())) {
      try {
        apply_setting(config, key, v);
      } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidConfig, name + ": " + e.detail());
      }
    }
  }
}

std::string render_config(const CliConfig& config) {
  std::string out;
  for (const auto& key : config_keys()) out += key + " = " + get(config, key) + "\n";
  return out;
}

}  // namespace qualcode
