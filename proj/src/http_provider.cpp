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

#include "httplib.h"
#include "qualcode/llm_client.hpp"

namespace qualcode {

namespace {

struct SplitUrl {
  std::string scheme_host_port;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ClientError(ErrorCategory::kDataHandling, "invalid base_url '" + url + "'", false);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpProvider final : public Provider {
 public:
  WireResponse post(const WireRequest& request, const ProviderConfig& config) override {
    const SplitUrl url = split_url(request.url);
    httplib::Client client(url.scheme_host_port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (!config.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config.api_key);
    }
    auto result = client.Post(url.path, headers, request.body, "application/json");

    WireResponse out;
    if (!result) {
      const auto err = result.error();
      switch (err) {
        case httplib::Error::ConnectionTimeout:
        case httplib::Error::Read:
          out.transport = WireResponse::Transport::kTimeout;
          break;
        case httplib::Error::Connection:
          out.transport = WireResponse::Transport::kConnectFailed;
          break;
        default:
          out.transport = WireResponse::Transport::kOther;
          break;
      }
      out.transport_detail = httplib::to_string(err);
      return out;
    }
    out.status = result->status;
    out.body = result->body;
    return out;
  }

  bool supports_concurrency() const override { return true; }
  std::string name() const override { return "http"; }
};

}  // namespace

std::shared_ptr<Provider> make_http_provider() { return std::make_shared<HttpProvider>(); }

}  // namespace qualcode
