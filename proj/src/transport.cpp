// Copyright 2026 The twinbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "twinbench/transport.hpp"

#include <httplib.h>

#include "twinbench/error.hpp"

namespace twinbench {
namespace {

class HttpTransport : public Transport {
 public:
  HttpTransport(const std::string& base_url, std::chrono::milliseconds timeout)
      : client_(base_url) {
    if (!client_.is_valid()) {
      throw Error(ErrorCode::kInvalidArgument, "invalid base url: " + base_url);
    }
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client_.set_connection_timeout(secs.count(), usecs.count());
    client_.set_read_timeout(secs.count(), usecs.count());
    client_.set_write_timeout(secs.count(), usecs.count());
  }

  HttpResponse post_json(const std::string& path, const std::string& body,
                         const std::map<std::string, std::string>& headers) override {
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client_.Post(path, h, body, "application/json");
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout ||
          err == httplib::Error::Write) {
        throw Error(ErrorCode::kTimeout, "http: " + httplib::to_string(err) + " on " + path);
      }
      throw Error(ErrorCode::kProviderError, "http: " + httplib::to_string(err) + " on " + path);
    }
    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers) out.headers[k] = v;
    return out;
  }

 private:
  httplib::Client client_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const std::string& base_url,
                                               std::chrono::milliseconds timeout) {
  return std::make_unique<HttpTransport>(base_url, timeout);
}

}  // namespace twinbench
