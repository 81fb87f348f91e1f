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

#ifndef SPANSTEER_GENERATION_H_
#define SPANSTEER_GENERATION_H_

// Second pipeline stage: marked-span conditional generation.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spansteer/corpus.h"
#include "spansteer/seq2seq.h"

namespace spansteer {

// One (marked document, gold summary) pair per example. Salient oracle
// spans are overlap-resolved preferring longer spans, then earlier starts.
// Examples without salient spans keep an unmarked document.
std::vector<GenerationPair> build_generation_training_set(
    std::span<const AnnotatedExample> corpus);

struct GeneratorEpoch {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_rouge2 = 0.0;
};

struct GeneratorCheckpoint {
  std::unique_ptr<Seq2SeqAdapter> model;
  std::vector<GeneratorEpoch> history;
  std::size_t best_epoch = 0;  // 0 = initial model
};

// Mean ROUGE-2 F1 of generate(source) against target over `pairs`.
double mean_rouge2(std::span<const GenerationPair> pairs, const Seq2SeqAdapter& model,
                   const DecodeConfig& decode);

// Trains for config.epochs and returns the epoch with the best validation
// ROUGE-2 F1 (earliest on ties). An empty validation set falls back to the
// training pairs.
GeneratorCheckpoint train_generator(std::span<const GenerationPair> train,
                                    std::span<const GenerationPair> validation,
                                    const Seq2SeqAdapter& initial,
                                    const Seq2SeqTrainConfig& config,
                                    const DecodeConfig& validation_decode = {});

struct SummaryOutput {
  std::string id;
  std::vector<TokenSpan> spans;
  std::vector<std::string> summary_tokens;
  std::string summary;
  DecodeConfig decode;

  nlohmann::ordered_json to_json() const;
  static SummaryOutput from_json(const nlohmann::json& j);
};

// Marks `spans` (already non-overlapping) and generates a summary.
SummaryOutput summarize(const Document& doc, std::span<const TokenSpan> spans,
                        const Seq2SeqAdapter& model, const DecodeConfig& decode);

std::vector<SummaryOutput> load_generations(const std::string& path);
void write_generations(const std::string& path, std::span<const SummaryOutput> outputs);

// Checkpoint directory: model.json and manifest.json.
void save_generator(const std::string& dir, const GeneratorCheckpoint& checkpoint);

struct LoadedGenerator {
  std::unique_ptr<Seq2SeqAdapter> model;
  std::size_t best_epoch = 0;
  std::string manifest_hash;
};
LoadedGenerator load_generator(const std::string& dir);

}  // namespace spansteer

#endif  // SPANSTEER_GENERATION_H_
