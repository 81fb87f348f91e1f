// Copyright 2026 The SpanSteer Authors.
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

#ifndef SPANSTEER_JSON_CHANNEL_H_
#define SPANSTEER_JSON_CHANNEL_H_

// Request/response transport for out-of-process adapters. A request is one
// JSON object; the reply is one JSON object.

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace spansteer {

class JsonChannel {
 public:
  virtual ~JsonChannel() = default;
  // Throws AdapterError on transport failure or a reply carrying "error".
  virtual nlohmann::json call(const nlohmann::json& request) = 0;
  virtual std::string describe() const = 0;
};

// Talks to a child process, one JSON document per line on stdin/stdout.
// Calls are serialized; the child is terminated on destruction.
class ProcessChannel : public JsonChannel {
 public:
  explicit ProcessChannel(std::vector<std::string> argv);
  ~ProcessChannel() override;

  ProcessChannel(const ProcessChannel&) = delete;
  ProcessChannel& operator=(const ProcessChannel&) = delete;

  nlohmann::json call(const nlohmann::json& request) override;
  std::string describe() const override;

 private:
  std::vector<std::string> argv_;
  std::mutex mu_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

// POSTs each request to `url` (http://host:port/path).
class HttpChannel : public JsonChannel {
 public:
  explicit HttpChannel(std::string url, int timeout_seconds = 30);

  nlohmann::json call(const nlohmann::json& request) override;
  std::string describe() const override { return url_; }

 private:
  std::string url_;
  std::string host_;
  int port_ = 80;
  std::string path_;
  int timeout_seconds_;
};

// "process:<command line>" or "http://..." -> channel.
std::shared_ptr<JsonChannel> make_channel(const std::string& target);

}  // namespace spansteer

#endif  // SPANSTEER_JSON_CHANNEL_H_
