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

#include "spansteer/generation.h"

#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>

#include "spansteer/error.h"
#include "spansteer/rouge.h"
#include "spansteer/text.h"

namespace spansteer {
namespace {

void require_markers(const Seq2SeqAdapter& model) {
  const auto& special = model.special_tokens();
  if (!special.contains(std::string(kSpanStart)) || !special.contains(std::string(kSpanEnd))) {
    throw ConfigError("seq2seq adapter '" + model.version() +
                      "' has no [SS]/[SE] special tokens registered");
  }
}

}  // namespace

std::vector<GenerationPair> build_generation_training_set(
    std::span<const AnnotatedExample> corpus) {
  std::vector<GenerationPair> out;
  out.reserve(corpus.size());
  std::size_t unmarked = 0;
  for (const auto& ex : corpus) {
    std::vector<ScoredSpan> scored;
    for (const auto& s : ex.salient_spans()) scored.push_back({s, 0.0});
    const auto spans = resolve_overlaps(scored);
    if (spans.empty()) ++unmarked;
    out.push_back({ex.document.id, mark_spans(ex.document.tokens, spans), ex.summary.tokens});
  }
  if (unmarked) {
    spdlog::info("{} of {} generation examples have no salient spans and stay unmarked", unmarked,
                 corpus.size());
  }
  return out;
}

double mean_rouge2(std::span<const GenerationPair> pairs, const Seq2SeqAdapter& model,
                   const DecodeConfig& decode) {
  if (pairs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : pairs) {
    total += rouge_n(model.generate(p.source, decode), p.target, 2).f1;
  }
  return total / static_cast<double>(pairs.size());
}

GeneratorCheckpoint train_generator(std::span<const GenerationPair> train,
                                    std::span<const GenerationPair> validation,
                                    const Seq2SeqAdapter& initial,
                                    const Seq2SeqTrainConfig& config,
                                    const DecodeConfig& validation_decode) {
  if (train.empty()) throw ValidationError("train_generator: training set is empty");
  require_markers(initial);
  if (validation.empty()) {
    spdlog::warn("train_generator: no validation pairs, selecting on the training pairs");
    validation = train;
  }
  GeneratorCheckpoint result;
  auto model = initial.clone();
  result.model = model->clone();
  std::mt19937_64 rng(config.seed);
  double best = -1.0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    GeneratorEpoch stats;
    stats.epoch = epoch;
    stats.train_loss = model->train_epoch(train, config, rng);
    stats.validation_rouge2 = mean_rouge2(validation, *model, validation_decode);
    spdlog::info("generator epoch {}: train loss {:.6f}, validation ROUGE-2 F1 {:.4f}", epoch,
                 stats.train_loss, stats.validation_rouge2);
    result.history.push_back(stats);
    if (stats.validation_rouge2 > best) {
      best = stats.validation_rouge2;
      result.best_epoch = epoch;
      result.model = model->clone();
    }
  }
  return result;
}

nlohmann::ordered_json SummaryOutput::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["spans"] = nlohmann::ordered_json::array();
  for (const auto& s : spans) j["spans"].push_back({s.start, s.end});
  j["summary"] = summary;
  j["summary_tokens"] = summary_tokens;
  j["decode_config"] = decode.to_json();
  return j;
}

SummaryOutput SummaryOutput::from_json(const nlohmann::json& j) {
  SummaryOutput o;
  try {
    o.id = j.at("id").get<std::string>();
    for (const auto& s : j.at("spans")) {
      o.spans.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
    }
    o.summary = j.at("summary").get<std::string>();
    o.summary_tokens = j.at("summary_tokens").get<std::vector<std::string>>();
    o.decode = DecodeConfig::from_json(j.value("decode_config", nlohmann::json::object()));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed generation record: ") + e.what());
  }
  return o;
}

SummaryOutput summarize(const Document& doc, std::span<const TokenSpan> spans,
                        const Seq2SeqAdapter& model, const DecodeConfig& decode) {
  SummaryOutput out;
  out.id = doc.id;
  out.spans.assign(spans.begin(), spans.end());
  std::sort(out.spans.begin(), out.spans.end());
  out.decode = decode;
  const auto marked = mark_spans(doc.tokens, out.spans);
  try {
    out.summary_tokens = model.generate(marked, decode);
  } catch (const std::exception& e) {
    throw AdapterError("generation for document '" + doc.id + "'", e.what());
  }
  out.summary = detokenize(out.summary_tokens);
  return out;
}

std::vector<SummaryOutput> load_generations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open generations file " + path);
  std::vector<SummaryOutput> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(SummaryOutput::from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw ValidationError(path + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void write_generations(const std::string& path, std::span<const SummaryOutput> outputs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const auto& o : outputs) out << o.to_json().dump() << '\n';
}

void save_generator(const std::string& dir, const GeneratorCheckpoint& checkpoint) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "model.json", std::ios::binary);
    out << checkpoint.model->state().dump() << '\n';
  }
  nlohmann::json history = nlohmann::json::array();
  for (const auto& h : checkpoint.history) {
    history.push_back({{"epoch", h.epoch},
                       {"train_loss", h.train_loss},
                       {"validation_rouge2", h.validation_rouge2}});
  }
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  out << nlohmann::json{{"component", "marked_generator"},
                        {"adapter", checkpoint.model->version()},
                        {"selection_metric", "rouge2_f1"},
                        {"best_epoch", checkpoint.best_epoch},
                        {"history", history}}
             .dump(2)
      << '\n';
}

LoadedGenerator load_generator(const std::string& dir) {
  namespace fs = std::filesystem;
  const auto model_path = fs::path(dir) / "model.json";
  const auto manifest_path = fs::path(dir) / "manifest.json";
  if (!fs::exists(model_path) || !fs::exists(manifest_path)) {
    throw CheckpointError("generator", dir);
  }
  LoadedGenerator out;
  std::ifstream in(model_path);
  nlohmann::json state;
  nlohmann::json manifest;
  try {
    state = nlohmann::json::parse(in);
    std::ifstream min(manifest_path);
    manifest = nlohmann::json::parse(min);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed generator checkpoint in " + dir + ": " + e.what());
  }
  out.model = seq2seq_from_state(state);
  out.best_epoch = manifest.value("best_epoch", 0UL);
  out.manifest_hash = sha256_file(manifest_path.string());
  return out;
}

}  // namespace spansteer
