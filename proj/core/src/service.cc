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

#include "spansteer/service.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include <httplib.h>

#include "spansteer/error.h"
#include "spansteer/evaluation.h"
#include "spansteer/generation.h"
#include "spansteer/marking.h"
#include "spansteer/pipeline.h"
#include "spansteer/text.h"

namespace spansteer {
namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

ServiceResponse error_response(int status, const std::string& message) {
  return {status, ordered_json{{"error", message}}};
}

ordered_json span_pair(const TokenSpan& s) { return ordered_json::array({s.start, s.end}); }

void install_cors(httplib::Server& server, const std::string& origin) {
  server.set_default_headers({{"Access-Control-Allow-Origin", origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
}

void reply(httplib::Response& res, const ServiceResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

}  // namespace

struct ControlService::Session {
  std::string id;
  Document document;
  std::vector<TokenSpan> candidates;     // id = index
  std::map<std::size_t, double> scores;  // candidate id -> logit (visible candidates only)
  Clock::time_point last_used;
  std::mutex mu;  // guards last_result
  std::optional<ordered_json> last_result;
};

ServiceModels load_service_models(const RunConfig& config) {
  ServiceModels m;
  auto adapters = make_adapters(config.adapters);
  m.provider = std::shared_ptr<const SyntacticProvider>(adapters.provider.release());
  m.qg = std::shared_ptr<const QuestionGenerator>(adapters.qg.release());
  m.qa = std::shared_ptr<const QuestionAnswerer>(adapters.qa.release());
  m.span_type = config.span_type;
  m.decode = config.decode;
  const RunLayout layout(config.output_dir);
  if (fs::exists(layout.classifier() / "manifest.json")) {
    auto c = load_classifier(layout.classifier().string());
    m.encoder = std::shared_ptr<const TokenEncoder>(c.encoder.release());
    m.head = c.head;
    m.manifest_hashes["classifier"] = c.manifest_hash;
  } else {
    spdlog::warn("no classifier checkpoint in {}; /analyze will answer 503",
                 layout.classifier().string());
  }
  if (fs::exists(layout.generator() / "manifest.json")) {
    auto g = load_generator(layout.generator().string());
    m.generator = std::shared_ptr<const Seq2SeqAdapter>(g.model.release());
    m.manifest_hashes["generator"] = g.manifest_hash;
  } else {
    spdlog::warn("no generator checkpoint in {}; /generate will answer 503",
                 layout.generator().string());
  }
  return m;
}

ControlService::ControlService(ServiceModels models, ServiceConfig config)
    : models_(std::move(models)),
      config_(std::move(config)),
      inflight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(config_.max_inflight, 1))) {}

ControlService::~ControlService() { stop(); }

std::size_t ControlService::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

void ControlService::evict_expired() {
  const auto now = now_();
  const auto ttl = std::chrono::seconds(config_.session_ttl_seconds);
  std::lock_guard lock(mu_);
  std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second->last_used > ttl; });
}

std::shared_ptr<ControlService::Session> ControlService::find_session(const std::string& id) {
  evict_expired();
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second->last_used = now_();
  return it->second;
}

ServiceResponse ControlService::analyze(const std::string& body) {
  json request;
  try {
    request = json::parse(body);
  } catch (const json::parse_error&) {
    return error_response(400, "request body is not JSON");
  }
  if (!request.is_object() || !request.contains("text") || !request["text"].is_string()) {
    return error_response(400, "field 'text' (string) is required");
  }
  const auto text = request["text"].get<std::string>();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    return error_response(400, "text is empty");
  }
  if (text.size() > config_.max_chars) {
    return error_response(413, "text exceeds " + std::to_string(config_.max_chars) +
                                   " characters");
  }
  if (!models_.provider || !models_.encoder || !models_.head) {
    return error_response(503, "span classifier unavailable");
  }

  auto session = std::make_shared<Session>();
  session->id = sha256_hex(text).substr(0, 16);
  try {
    session->document = annotate(text, *models_.provider, {.id = session->id});
  } catch (const AdapterError& e) {
    return error_response(503, e.what());
  } catch (const ValidationError& e) {
    return error_response(400, e.what());
  }
  session->candidates = document_candidates(session->document, models_.span_type);
  const auto ranked = predict_top_k(session->document, session->candidates,
                                    session->candidates.size(), *models_.encoder, *models_.head);
  std::map<TokenSpan, std::size_t> index;
  for (std::size_t i = 0; i < session->candidates.size(); ++i) index[session->candidates[i]] = i;

  ordered_json spans = ordered_json::array();
  for (const auto& s : ranked) {
    const auto id = index.at(s.span);
    session->scores[id] = s.score;
    spans.push_back({{"id", id},
                     {"start", s.span.start},
                     {"end", s.span.end},
                     {"text", session->document.surface(s.span)},
                     {"score", s.score},
                     {"probability", s.probability}});
  }
  ordered_json sentences = ordered_json::array();
  for (const auto& s : session->document.sentences) sentences.push_back(span_pair(s));

  ordered_json out;
  out["session_id"] = session->id;
  out["tokens"] = session->document.tokens;
  out["sentences"] = sentences;
  out["spans"] = spans;

  evict_expired();
  session->last_used = now_();
  {
    std::lock_guard lock(mu_);
    sessions_[session->id] = session;
  }
  return {200, out};
}

ServiceResponse ControlService::generate(const std::string& body) {
  json request;
  try {
    request = json::parse(body);
  } catch (const json::parse_error&) {
    return error_response(400, "request body is not JSON");
  }
  if (!request.is_object() || !request.contains("session_id") ||
      !request["session_id"].is_string()) {
    return error_response(400, "field 'session_id' (string) is required");
  }
  auto session = find_session(request["session_id"].get<std::string>());
  if (!session) return error_response(404, "unknown session");

  std::set<std::size_t> selected;
  if (auto it = request.find("span_ids"); it != request.end() && !it->is_null()) {
    if (!it->is_array()) return error_response(422, "span_ids must be an array");
    for (const auto& v : *it) {
      if (!v.is_number_integer() || v.get<long long>() < 0 ||
          !session->scores.contains(v.get<std::size_t>())) {
        return error_response(422, "invalid span id " + v.dump());
      }
      selected.insert(v.get<std::size_t>());
    }
  }
  if (!models_.generator) return error_response(503, "generator unavailable");

  std::vector<std::size_t> ids(selected.begin(), selected.end());
  std::vector<ScoredSpan> scored;
  for (auto id : ids) scored.push_back({session->candidates[id], session->scores.at(id)});
  const auto resolution = resolve_overlap_indices(scored);
  std::vector<TokenSpan> spans;
  ordered_json kept_ids = ordered_json::array();
  for (auto i : resolution.kept) {
    spans.push_back(scored[i].span);
    kept_ids.push_back(ids[i]);
  }
  ordered_json dropped_ids = ordered_json::array();
  for (auto i : resolution.dropped) dropped_ids.push_back(ids[i]);

  SummaryOutput summary;
  {
    inflight_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{inflight_};
    try {
      summary = summarize(session->document, spans, *models_.generator, models_.decode);
    } catch (const std::exception& e) {
      return error_response(503, e.what());
    }
  }

  ordered_json out;
  out["session_id"] = session->id;
  out["summary"] = summary.summary;
  out["marked_span_ids"] = kept_ids;
  out["dropped_span_ids"] = dropped_ids;
  out["per_question"] = ordered_json::array();
  if (!spans.empty()) {
    if (!models_.qg || !models_.qa) return error_response(503, "question adapters unavailable");
    std::vector<QuestionOutcome> details;
    double recall = 0.0;
    try {
      const auto labels = questions_for_spans(session->document, spans, *models_.qg);
      recall = question_recall(session->document, labels, summary.summary, *models_.qa, &details);
    } catch (const AdapterError& e) {
      return error_response(503, e.what());
    }
    for (std::size_t i = 0; i < details.size(); ++i) {
      out["per_question"].push_back({{"span_id", kept_ids[i]},
                                     {"question", details[i].question},
                                     {"answered", details[i].answered},
                                     {"answer", details[i].answer}});
    }
    out["question_recall"] = recall;
    if (!summary.summary_tokens.empty()) {
      out["k_length_ratio"] = k_length_ratio(spans.size(), summary.summary_tokens.size());
    }
  }
  {
    std::lock_guard lock(session->mu);
    session->last_result = out;
  }
  return {200, out};
}

ServiceResponse ControlService::health() const {
  ordered_json adapters;
  adapters["syntactic"] = models_.provider ? ordered_json(models_.provider->name()) : ordered_json(nullptr);
  adapters["qg"] = models_.qg ? ordered_json(models_.qg->version()) : ordered_json(nullptr);
  adapters["qa"] = models_.qa ? ordered_json(models_.qa->version()) : ordered_json(nullptr);
  adapters["encoder"] = models_.encoder ? ordered_json(models_.encoder->version()) : ordered_json(nullptr);
  adapters["generator"] =
      models_.generator ? ordered_json(models_.generator->version()) : ordered_json(nullptr);
  ordered_json checkpoints = ordered_json::object();
  for (const auto& [k, v] : models_.manifest_hashes) checkpoints[k] = v;
  const bool ok = models_.provider && models_.qg && models_.qa && models_.encoder &&
                  models_.head && models_.generator;
  ordered_json out;
  out["status"] = ok ? "ok" : "degraded";
  out["adapters"] = adapters;
  out["checkpoints"] = checkpoints;
  return {ok ? 200 : 503, out};
}

int ControlService::bind(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  install_cors(*server_, config_.cors_origin);
  server_->Post("/analyze", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, analyze(req.body));
  });
  server_->Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, generate(req.body));
  });
  server_->Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, health());
  });
  // Let over-limit bodies reach the handler so it can answer 413 itself.
  server_->set_payload_max_length(std::max<std::size_t>(config_.max_chars * 8, 1 << 20));
  if (port == 0) return server_->bind_to_any_port(host);
  if (!server_->bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void ControlService::listen() {
  if (!server_) throw Error("ControlService::listen called before bind");
  server_->listen_after_bind();
}

void ControlService::stop() {
  if (server_) server_->stop();
}

AdapterHttpServer::AdapterHttpServer(const QuestionGenerator& qg, const QuestionAnswerer& qa,
                                     const SyntacticProvider& provider)
    : server_(std::make_unique<httplib::Server>()) {
  server_->Post(R"(/.*)", [&qg, &qa, &provider](const httplib::Request& req,
                                                httplib::Response& res) {
    json reply;
    try {
      reply = handle_adapter_request(json::parse(req.body), qg, qa, provider);
    } catch (const json::parse_error& e) {
      reply = {{"error", std::string("malformed request: ") + e.what()}};
    }
    res.set_content(reply.dump(), "application/json");
  });
}

AdapterHttpServer::~AdapterHttpServer() { stop(); }

int AdapterHttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  if (!server_->bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void AdapterHttpServer::listen() { server_->listen_after_bind(); }

void AdapterHttpServer::stop() { server_->stop(); }

}  // namespace spansteer
