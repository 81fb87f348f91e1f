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

#include "spansteer/config.h"

#include <array>
#include <fstream>
#include <map>
#include <set>

#include "spansteer/error.h"

namespace spansteer {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Reads fields from one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where() + "field '" + key + "': " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string child_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.contains(k)) throw ConfigError(where() + "unknown key '" + k + "'");
    }
  }

 private:
  std::string where() const { return "config" + (path_.empty() ? "" : " " + path_) + ": "; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
void section(Section& parent, const char* key, Fn&& fn) {
  if (const json* c = parent.child(key)) {
    Section s(*c, parent.child_path(key));
    fn(s);
    s.finish();
  }
}

}  // namespace

std::size_t default_k(const std::string& dataset, SpanType type) {
  // sentence, entity, np, qa
  static const std::map<std::string, std::array<std::size_t, 4>> table = {
      {"cnndm", {3, 10, 25, 20}},
      {"xsum", {1, 1, 5, 1}},
      {"nytimes", {4, 15, 45, 27}},
  };
  auto it = table.find(dataset);
  if (it == table.end()) {
    throw ConfigError("unknown dataset '" + dataset + "' (expected cnndm, xsum or nytimes)");
  }
  return it->second[static_cast<std::size_t>(type)];
}

std::size_t RunConfig::effective_k() const { return k ? *k : default_k(dataset, span_type); }

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  encoder.seed = s;
  classifier.seed = s;
  generator.seed = s;
}

void RunConfig::validate() const {
  if (k && *k < 1) throw ConfigError("k must be >= 1");
  (void)default_k(dataset, span_type);
  if (decode.beam < 1) throw ConfigError("decode.beam must be >= 1");
  if (decode.max_length < 1) throw ConfigError("decode.max_length must be >= 1");
  if (classifier.batch_size < 1) throw ConfigError("classifier.batch_size must be >= 1");
  if (encoder.dim < 1 || encoder.buckets < 1 || encoder.positions < 1) {
    throw ConfigError("encoder dimensions must be >= 1");
  }
  if (sweep.k_min < 1) throw ConfigError("sweep.k_min must be >= 1");
  if (sweep.k_max && sweep.k_max < sweep.k_min) throw ConfigError("sweep range is empty");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (service.max_inflight < 1) throw ConfigError("service.max_inflight must be >= 1");
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["data"] = {{"train", data.train}, {"validation", data.validation}, {"test", data.test}};
  j["dataset"] = dataset;
  j["span_type"] = std::string(to_string(span_type));
  j["k"] = k ? ordered_json(*k) : ordered_json(nullptr);
  j["adapters"] = {{"encoder", adapters.encoder},
                   {"seq2seq", adapters.seq2seq},
                   {"qg", adapters.qg},
                   {"qa", adapters.qa},
                   {"syntactic", adapters.syntactic},
                   {"qa_no_answer_threshold", adapters.qa_no_answer_threshold},
                   {"max_concurrency", adapters.max_concurrency}};
  j["encoder"] = {{"dim", encoder.dim},
                  {"buckets", encoder.buckets},
                  {"positions", encoder.positions},
                  {"max_input_tokens", encoder.max_input_tokens},
                  {"init_scale", encoder.init_scale}};
  j["classifier"] = {{"epochs", classifier.epochs},
                     {"learning_rate", classifier.learning_rate},
                     {"weight_decay", classifier.weight_decay},
                     {"batch_size", classifier.batch_size},
                     {"freeze_encoder", classifier.freeze_encoder}};
  j["generator"] = {{"epochs", generator.epochs},
                    {"learning_rate", generator.learning_rate},
                    {"weight_decay", generator.weight_decay}};
  j["decode"] = decode.to_json();
  j["augment"] = augment;
  j["sweep"] = {{"k_min", sweep.k_min}, {"k_max", sweep.k_max}};
  j["service"] = {{"host", service.host},
                  {"port", service.port},
                  {"max_chars", service.max_chars},
                  {"session_ttl_seconds", service.session_ttl_seconds},
                  {"max_inflight", service.max_inflight},
                  {"cors_origin", service.cors_origin}};
  j["output_dir"] = output_dir;
  j["seed"] = seed;
  j["workers"] = workers;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  Section root(j, "");
  section(root, "data", [&](Section& s) {
    s.get("train", c.data.train);
    s.get("validation", c.data.validation);
    s.get("test", c.data.test);
  });
  root.get("dataset", c.dataset);
  std::string span_type(to_string(c.span_type));
  root.get("span_type", span_type);
  try {
    c.span_type = parse_span_type(span_type);
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (const json* k = root.child("k")) {
    if (!k->is_number_integer() || k->get<long long>() < 1) {
      throw ConfigError("config: k must be an integer >= 1");
    }
    c.k = k->get<std::size_t>();
  }
  section(root, "adapters", [&](Section& s) {
    s.get("encoder", c.adapters.encoder);
    s.get("seq2seq", c.adapters.seq2seq);
    s.get("qg", c.adapters.qg);
    s.get("qa", c.adapters.qa);
    s.get("syntactic", c.adapters.syntactic);
    s.get("qa_no_answer_threshold", c.adapters.qa_no_answer_threshold);
    s.get("max_concurrency", c.adapters.max_concurrency);
  });
  section(root, "encoder", [&](Section& s) {
    s.get("dim", c.encoder.dim);
    s.get("buckets", c.encoder.buckets);
    s.get("positions", c.encoder.positions);
    s.get("max_input_tokens", c.encoder.max_input_tokens);
    s.get("init_scale", c.encoder.init_scale);
  });
  section(root, "classifier", [&](Section& s) {
    s.get("epochs", c.classifier.epochs);
    s.get("learning_rate", c.classifier.learning_rate);
    s.get("weight_decay", c.classifier.weight_decay);
    s.get("batch_size", c.classifier.batch_size);
    s.get("freeze_encoder", c.classifier.freeze_encoder);
  });
  section(root, "generator", [&](Section& s) {
    s.get("epochs", c.generator.epochs);
    s.get("learning_rate", c.generator.learning_rate);
    s.get("weight_decay", c.generator.weight_decay);
  });
  section(root, "decode", [&](Section& s) {
    s.get("beam", c.decode.beam);
    s.get("max_length", c.decode.max_length);
    s.get("length_penalty", c.decode.length_penalty);
  });
  root.get("augment", c.augment);
  section(root, "sweep", [&](Section& s) {
    s.get("k_min", c.sweep.k_min);
    s.get("k_max", c.sweep.k_max);
  });
  section(root, "service", [&](Section& s) {
    s.get("host", c.service.host);
    s.get("port", c.service.port);
    s.get("max_chars", c.service.max_chars);
    s.get("session_ttl_seconds", c.service.session_ttl_seconds);
    s.get("max_inflight", c.service.max_inflight);
    s.get("cors_origin", c.service.cors_origin);
  });
  root.get("output_dir", c.output_dir);
  std::uint64_t seed = c.seed;
  root.get("seed", seed);
  c.apply_seed(seed);
  root.get("workers", c.workers);
  root.finish();
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace spansteer
