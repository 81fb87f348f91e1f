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

#ifndef SPANSTEER_CONFIG_H_
#define SPANSTEER_CONFIG_H_

// Run configuration shared by every command. One JSON file holds it all;
// unknown keys are rejected so typos fail loudly.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "spansteer/classifier.h"
#include "spansteer/corpus.h"
#include "spansteer/encoder.h"
#include "spansteer/seq2seq.h"

namespace spansteer {

struct DataPaths {
  std::string train;
  std::string validation;
  std::string test;
};

// Adapter selectors. qg / qa / syntactic accept "stub" (or "fixture"),
// "process:<command line>" or "http://host:port".
struct AdapterSelection {
  std::string encoder = "tiny";
  std::string seq2seq = "tiny";  // tiny | echo | echo:<n>
  std::string qg = "stub";
  std::string qa = "stub";
  std::string syntactic = "fixture";
  double qa_no_answer_threshold = 0.0;
  std::size_t max_concurrency = 1;  // per remote adapter
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_chars = 20000;
  std::size_t session_ttl_seconds = 1800;
  std::size_t max_inflight = 2;
  std::string cors_origin = "*";
};

struct SweepConfig {
  std::size_t k_min = 1;
  std::size_t k_max = 0;  // 0 = the dataset default k
};

struct RunConfig {
  DataPaths data;
  std::string dataset = "cnndm";  // cnndm | xsum | nytimes; selects default k
  SpanType span_type = SpanType::kQuestionAnswer;
  std::optional<std::size_t> k;  // unset = dataset default
  AdapterSelection adapters;
  TinyEncoderConfig encoder;
  ClassifierTrainConfig classifier;
  Seq2SeqTrainConfig generator;
  DecodeConfig decode;
  bool augment = true;
  SweepConfig sweep;
  ServiceConfig service;
  std::string output_dir = "spansteer-run";
  std::uint64_t seed = 13;
  std::size_t workers = 1;

  // Spans passed to the generator (k for the selected span type).
  std::size_t effective_k() const;
  // Sets seed everywhere a component draws randomness.
  void apply_seed(std::uint64_t s);
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
};

// Number of spans selected per dataset and span type.
std::size_t default_k(const std::string& dataset, SpanType type);

}  // namespace spansteer

#endif  // SPANSTEER_CONFIG_H_
