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

#ifndef SPANSTEER_SERVICE_H_
#define SPANSTEER_SERVICE_H_

// Interactive control service: /analyze scores a document's candidate spans,
// /generate marks a selection and reports which of its questions the summary
// answers. Handlers are plain methods so they can be exercised without HTTP.

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spansteer/annotation.h"
#include "spansteer/classifier.h"
#include "spansteer/config.h"
#include "spansteer/encoder.h"
#include "spansteer/qa.h"
#include "spansteer/seq2seq.h"

namespace httplib {
class Server;
}

namespace spansteer {

struct ServiceModels {
  std::shared_ptr<const SyntacticProvider> provider;
  std::shared_ptr<const QuestionGenerator> qg;
  std::shared_ptr<const QuestionAnswerer> qa;
  std::shared_ptr<const TokenEncoder> encoder;  // with head: the span classifier
  std::optional<ClassifierHead> head;
  std::shared_ptr<const Seq2SeqAdapter> generator;
  SpanType span_type = SpanType::kQuestionAnswer;
  DecodeConfig decode;
  std::map<std::string, std::string> manifest_hashes;  // checkpoint -> sha256
};

// Loads whatever is available; missing checkpoints leave the slot empty and
// the service reports itself degraded.
ServiceModels load_service_models(const RunConfig& config);

struct ServiceResponse {
  int status = 200;
  nlohmann::ordered_json body;
};

class ControlService {
 public:
  using Clock = std::chrono::steady_clock;

  ControlService(ServiceModels models, ServiceConfig config);
  ~ControlService();

  ControlService(const ControlService&) = delete;
  ControlService& operator=(const ControlService&) = delete;

  ServiceResponse analyze(const std::string& body);
  ServiceResponse generate(const std::string& body);
  ServiceResponse health() const;

  std::size_t session_count() const;
  // Test hook: replaces the clock used for session expiry.
  void set_clock(std::function<Clock::time_point()> now) { now_ = std::move(now); }

  // Binds (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); requires bind().
  void listen();
  void stop();

 private:
  struct Session;

  std::shared_ptr<Session> find_session(const std::string& id);
  void evict_expired();

  ServiceModels models_;
  ServiceConfig config_;
  std::function<Clock::time_point()> now_ = [] { return Clock::now(); };
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::counting_semaphore<> inflight_;
  std::unique_ptr<httplib::Server> server_;
};

// POST any path with one adapter request per body (the HTTP form of the
// line-delimited adapter protocol). Blocks until stopped via the returned handle.
class AdapterHttpServer {
 public:
  AdapterHttpServer(const QuestionGenerator& qg, const QuestionAnswerer& qa,
                    const SyntacticProvider& provider);
  ~AdapterHttpServer();
  int bind(const std::string& host, int port);
  void listen();
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace spansteer

#endif  // SPANSTEER_SERVICE_H_
