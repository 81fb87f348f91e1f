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

#ifndef SPANSTEER_SEQ2SEQ_H_
#define SPANSTEER_SEQ2SEQ_H_

// Conditional generator interface plus two built-in adapters: a tiny
// trainable log-linear decoder with copy features, and a deterministic echo
// stub that returns the document sentences holding marked spans.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "spansteer/marking.h"

namespace spansteer {

struct DecodeConfig {
  std::size_t beam = 4;
  std::size_t max_length = 142;
  double length_penalty = 2.0;

  nlohmann::ordered_json to_json() const;
  static DecodeConfig from_json(const nlohmann::json& j);
  friend bool operator==(const DecodeConfig&, const DecodeConfig&) = default;
};

struct GenerationPair {
  std::string id;
  MarkedSequence source;
  std::vector<std::string> target;
};

struct Seq2SeqTrainConfig {
  std::size_t epochs = 5;
  double learning_rate = 3e-5;
  double weight_decay = 0.01;
  std::uint64_t seed = 13;
};

class Seq2SeqAdapter {
 public:
  virtual ~Seq2SeqAdapter() = default;

  virtual std::string version() const = 0;
  // Special tokens stay atomic and are never emitted.
  virtual void register_special_tokens(const std::vector<std::string>& tokens) = 0;
  virtual const std::set<std::string>& special_tokens() const = 0;
  // One pass over `pairs` with cross-entropy; returns mean per-token loss.
  virtual double train_epoch(std::span<const GenerationPair> pairs,
                             const Seq2SeqTrainConfig& config, std::mt19937_64& rng) = 0;
  virtual std::vector<std::string> generate(const MarkedSequence& source,
                                            const DecodeConfig& config) const = 0;
  virtual nlohmann::json state() const = 0;
  virtual std::unique_ptr<Seq2SeqAdapter> clone() const = 0;
  virtual std::size_t max_concurrency() const { return 0; }
};

// Next-token model over candidates = training vocabulary ∪ source tokens ∪
// end-of-summary. Score(w | history, source) =
//   unigram[w] + bigram[prev, w] + θ · copy_features(w)
// where the copy features say whether w continues a source n-gram, sits
// inside a marked region, repeats output, or closes a covered summary.
// Trained with softmax cross-entropy and lazy Adam; decoded by beam search.
class TinySeq2Seq : public Seq2SeqAdapter {
 public:
  static constexpr std::size_t kNumFeatures = 15;

  TinySeq2Seq();

  std::string version() const override { return "tiny-seq2seq/1"; }
  void register_special_tokens(const std::vector<std::string>& tokens) override;
  const std::set<std::string>& special_tokens() const override { return special_; }
  double train_epoch(std::span<const GenerationPair> pairs, const Seq2SeqTrainConfig& config,
                     std::mt19937_64& rng) override;
  std::vector<std::string> generate(const MarkedSequence& source,
                                    const DecodeConfig& config) const override;
  nlohmann::json state() const override;
  std::unique_ptr<Seq2SeqAdapter> clone() const override;

  static TinySeq2Seq from_state(const nlohmann::json& j);

  // Per-token log-probability of `target` under teacher forcing.
  double sequence_log_prob(const MarkedSequence& source,
                           std::span<const std::string> target) const;

 private:
  struct SourceIndex;
  struct Step;

  std::size_t param_for_unigram(const std::string& w, bool create);
  std::size_t param_for_bigram(const std::string& prev, const std::string& w, bool create);
  std::optional<std::size_t> find_unigram(const std::string& w) const;
  std::optional<std::size_t> find_bigram(const std::string& prev, const std::string& w) const;
  Step score_step(const SourceIndex& src, std::span<const std::string> history) const;
  void lazy_adam(const std::unordered_map<std::size_t, double>& grad,
                 const Seq2SeqTrainConfig& config);

  std::set<std::string> special_;
  std::vector<std::string> vocab_;  // insertion order
  std::unordered_map<std::string, std::size_t> unigram_;
  std::unordered_map<std::string, std::size_t> bigram_;
  std::vector<double> params_;  // [features | unigrams and bigrams]
  std::vector<double> adam_m_;
  std::vector<double> adam_v_;
  std::int64_t adam_t_ = 0;
};

// Returns the source sentences that contain a marked span, markers removed,
// followed by `extra_unmarked_sentences` further unmarked sentences. With no
// marks it returns the lead sentence plus the extras.
class EchoGenerator : public Seq2SeqAdapter {
 public:
  explicit EchoGenerator(std::size_t extra_unmarked_sentences = 0)
      : extra_(extra_unmarked_sentences) {}

  std::string version() const override { return "echo/" + std::to_string(extra_); }
  void register_special_tokens(const std::vector<std::string>& tokens) override;
  const std::set<std::string>& special_tokens() const override { return special_; }
  double train_epoch(std::span<const GenerationPair>, const Seq2SeqTrainConfig&,
                     std::mt19937_64&) override {
    return 0.0;
  }
  std::vector<std::string> generate(const MarkedSequence& source,
                                    const DecodeConfig& config) const override;
  nlohmann::json state() const override;
  std::unique_ptr<Seq2SeqAdapter> clone() const override;

 private:
  std::size_t extra_;
  std::set<std::string> special_;
};

// "tiny" or "echo[:N]".
std::unique_ptr<Seq2SeqAdapter> make_seq2seq(const std::string& kind);
std::unique_ptr<Seq2SeqAdapter> seq2seq_from_state(const nlohmann::json& state);

// Sentence spans of a plain token stream (split after . ! ?).
std::vector<TokenSpan> split_sentences(std::span<const std::string> tokens);

}  // namespace spansteer

#endif  // SPANSTEER_SEQ2SEQ_H_
