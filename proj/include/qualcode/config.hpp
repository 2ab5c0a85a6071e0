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

#ifndef QUALCODE_CONFIG_HPP_
#define QUALCODE_CONFIG_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qualcode/chunker.hpp"
#include "qualcode/llm_client.hpp"

namespace qualcode {

// Effective settings for the command-line tools. Sources are applied in the
// order defaults, config file, environment, flags; later ones win.
struct CliConfig {
  ProviderConfig provider;
  TokenBudget budget;
  int retry_delay_ms = 1000;

  std::string data_type = "interview";
  int n_themes = 10;
  bool role_play = false;
  std::string background;
  std::string instructions;

  bool mock = false;
  std::uint64_t seed = 0;
  std::string templates_dir;
  bool reproducible = false;

  std::string host = "127.0.0.1";
  int port = 8642;
};

// Recognized keys, in the order render_config prints them.
const std::vector<std::string>& config_keys();

// Throws kInvalidConfig for an unknown key or a value of the wrong type.
void apply_setting(CliConfig& config, std::string_view key, std::string_view value);

// `key = value` lines; blank lines and lines starting with '#' are ignored.
void apply_config_file(CliConfig& config, std::string_view contents);

using EnvLookup = std::function<const char*(const char*)>;
// For every key, QUALI_<KEY> in upper case (e.g. QUALI_API_KEY, QUALI_MODEL).
void apply_env(CliConfig& config, const EnvLookup& lookup);

// One `key = value` line per key; the api key prints as REDACTED.
std::string render_config(const CliConfig& config);

}  // namespace qualcode

#endif  // QUALCODE_CONFIG_HPP_
