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

#ifndef TWINBENCH_TRANSPORT_HPP_
#define TWINBENCH_TRANSPORT_HPP_

#include <chrono>
#include <map>
#include <memory>
#include <string>

namespace twinbench {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;
};

// Minimal JSON-over-HTTP seam. Tests substitute scripted fakes.
class Transport {
 public:
  virtual ~Transport() = default;
  // Throws Error(kTimeout) when the request times out and
  // Error(kProviderError) on connection failures. Non-2xx statuses are
  // returned, not thrown.
  virtual HttpResponse post_json(const std::string& path, const std::string& body,
                                 const std::map<std::string, std::string>& headers) = 0;
};

// base_url like "https://api.example.com" or "http://127.0.0.1:8080".
std::unique_ptr<Transport> make_http_transport(const std::string& base_url,
                                               std::chrono::milliseconds timeout);

}  // namespace twinbench

#endif  // TWINBENCH_TRANSPORT_HPP_
