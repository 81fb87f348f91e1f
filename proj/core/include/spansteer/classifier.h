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

#ifndef SPANSTEER_CLASSIFIER_H_
#define SPANSTEER_CLASSIFIER_H_

// First pipeline stage: a linear salience classifier over span
// representations built from token encodings.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "spansteer/corpus.h"
#include "spansteer/encoder.h"

namespace spansteer {

struct SpanScore {
  TokenSpan span;
  double score = 0.0;        // logit
  double probability = 0.5;  // sigmoid(score)
};

double sigmoid(double x);

struct ClassifierHead {
  Eigen::VectorXd weight;  // 2d
  double bias = 0.0;

  static ClassifierHead random(std::size_t encoder_dim, std::uint64_t seed, double scale = 0.01);
  double score(const Eigen::VectorXd& representation) const;
  nlohmann::json state() const;
  static ClassifierHead from_state(const nlohmann::json& j);
};

// [enc[start]; enc[end]]. The span must lie within the encoded rows.
Eigen::VectorXd span_representation(const Eigen::MatrixXd& encodings, const TokenSpan& span);

// Class-balanced binary cross-entropy on logits: half the mean loss of the
// positive spans plus half the mean loss of the negatives (plain mean when
// only one class is present). Class means are computed over distinct loss
// values weighted by multiplicity, so duplicating a class leaves the result
// bit-for-bit unchanged. Throws on empty or mismatched input.
double balanced_bce_loss(std::span<const double> logits, const std::vector<bool>& labels);
double balanced_bce_loss(std::span<const SpanScore> scores, const std::vector<bool>& labels);

// d(loss)/d(logit_i).
std::vector<double> balanced_bce_gradient(std::span<const double> logits,
                                          const std::vector<bool>& labels);

// Candidates that fit inside the encoder window; the rest are dropped.
std::vector<TokenSpan> visible_candidates(std::span<const TokenSpan> candidates,
                                          std::size_t encoded_tokens);

// Scores every visible candidate; returns the best k by descending score,
// ties broken by (start, end).
std::vector<SpanScore> predict_top_k(const Document& doc, std::span<const TokenSpan> candidates,
                                     std::size_t k, const TokenEncoder& encoder,
                                     const ClassifierHead& head);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t hits = 0;
};

// precision@k = hits / k, recall@k = hits / |oracle| (1 when the oracle is
// empty), hits = |top-k ∩ oracle|.
PrecisionRecall precision_recall_at_k(std::span<const SpanScore> ranked,
                                      std::span<const TokenSpan> oracle, std::size_t k);

struct ClassifierTrainConfig {
  std::size_t epochs = 3;
  double learning_rate = 3e-5;
  double weight_decay = 0.01;
  std::size_t batch_size = 1;  // documents per optimizer step
  std::uint64_t seed = 13;
  bool freeze_encoder = false;
};

struct ClassifierEpoch {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_precision_at_1 = 0.0;
};

struct TrainedClassifier {
  ClassifierHead head;
  std::unique_ptr<TrainableEncoder> encoder;
  std::vector<ClassifierEpoch> history;
  std::size_t best_epoch = 0;  // 0 = initial weights
  std::size_t dropped_spans = 0;
};

// Candidate spans of an example: every labeled span, salient or not.
std::vector<TokenSpan> candidate_spans(const AnnotatedExample& ex);

// Mean precision@1 over examples with at least one visible candidate.
double mean_precision_at_1(std::span<const AnnotatedExample> examples, const TokenEncoder& encoder,
                           const ClassifierHead& head);

// Minimizes balanced_bce_loss per document with AdamW. Returns the epoch
// checkpoint with the best validation precision@1 (earliest on ties).
TrainedClassifier train_classifier(std::span<const AnnotatedExample> train,
                                   std::span<const AnnotatedExample> validation,
                                   const TrainableEncoder& initial_encoder,
                                   const ClassifierTrainConfig& config);

// Checkpoint directory: head.json, encoder.json and manifest.json.
struct ClassifierManifest {
  SpanType span_type = SpanType::kQuestionAnswer;
  std::size_t k = 1;
  std::string selection_metric = "precision@1";
  std::size_t best_epoch = 0;
  std::vector<ClassifierEpoch> history;
};

void save_classifier(const std::string& dir, const ClassifierHead& head,
                     const TrainableEncoder& encoder, const ClassifierManifest& manifest);

struct LoadedClassifier {
  ClassifierHead head;
  std::unique_ptr<TrainableEncoder> encoder;
  ClassifierManifest manifest;
  std::string manifest_hash;
};

LoadedClassifier load_classifier(const std::string& dir);

}  // namespace spansteer

#endif  // SPANSTEER_CLASSIFIER_H_
