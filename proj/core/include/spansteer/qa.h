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

#ifndef SPANSTEER_QA_H_
#define SPANSTEER_QA_H_

// Question generation / answering adapters and the answer-correctness rule.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "spansteer/corpus.h"
#include "spansteer/json_channel.h"

namespace spansteer {

class SyntacticProvider;

struct GeneratedQuestion {
  std::string question;
  TokenSpan source_span;
  std::size_t source_sentence = 0;
};

struct QAPrediction {
  bool is_answerable = false;
  std::string answer_text;  // empty iff !is_answerable
  double confidence = 0.0;  // in [0, 1]
  // Character offset of the answer inside the context, when known.
  std::optional<std::size_t> answer_start;

  static QAPrediction unanswerable(double confidence = 0.0) { return {false, "", confidence, {}}; }
};

// Character range [begin, end) of the answer inside the sentence text.
using CharRange = std::pair<std::size_t, std::size_t>;

class QuestionGenerator {
 public:
  virtual ~QuestionGenerator() = default;
  // Returns a non-empty wh-question whose answer is `answer_text`.
  virtual std::string generate(std::string_view sentence_text, std::string_view answer_text,
                               CharRange answer_chars) const = 0;
  virtual std::string version() const = 0;
  virtual std::size_t max_concurrency() const { return 0; }  // 0 = unlimited
};

class QuestionAnswerer {
 public:
  virtual ~QuestionAnswerer() = default;
  virtual QAPrediction answer(std::string_view question, std::string_view context) const = 0;
  virtual std::string version() const = 0;
  virtual std::size_t max_concurrency() const { return 0; }
};

// True when the predicted answer shares a content token with the source
// phrase. Tokens are lowercased and stripped of surrounding punctuation, and
// function words are ignored unless the source phrase has nothing else.
bool answer_is_correct(std::string_view predicted, std::string_view source_phrase);

// Emits "Q[<answer>|<key>]?" where key is the first content token of the
// sentence outside the answer (lowercased, empty when none exists).
class TemplateStubGenerator : public QuestionGenerator {
 public:
  std::string generate(std::string_view sentence_text, std::string_view answer_text,
                       CharRange answer_chars) const override;
  std::string version() const override { return "template-stub/1"; }
};

// Answers stub questions. A question "Q[<phrase>|<key>]?" is answerable when
// some sentence of the context contains every content token of the phrase
// and the key token; the answer is the phrase as it occurs inside the
// shortest such window. Overrides keyed by (question, sha256(context)) win.
class LexicalStubAnswerer : public QuestionAnswerer {
 public:
  using OverrideTable = std::map<std::pair<std::string, std::string>, QAPrediction>;

  LexicalStubAnswerer() = default;
  explicit LexicalStubAnswerer(OverrideTable overrides) : overrides_(std::move(overrides)) {}

  QAPrediction answer(std::string_view question, std::string_view context) const override;
  std::string version() const override { return "lexical-stub/1"; }

 private:
  OverrideTable overrides_;
};

std::unique_ptr<QuestionGenerator> template_stub_generator();
std::unique_ptr<QuestionAnswerer> lexical_stub_answerer(
    LexicalStubAnswerer::OverrideTable overrides = {});

// Parses "Q[<phrase>|<key>]?" into (phrase, key).
std::optional<std::pair<std::string, std::string>> parse_stub_question(std::string_view q);

// Out-of-process adapters over the JSON wire format:
//   {"op":"generate","sentence":s,"answer":a} -> {"question":q}
//   {"op":"answer","question":q,"context":c} -> {"answerable":b,"answer":s,"confidence":f}
// A real span-QA backend may instead reply with "best_span_score" and
// "null_score"; the question is then answerable iff null - best < threshold.
class RemoteQuestionGenerator : public QuestionGenerator {
 public:
  RemoteQuestionGenerator(std::shared_ptr<JsonChannel> channel, std::size_t max_concurrency = 1);
  std::string generate(std::string_view sentence_text, std::string_view answer_text,
                       CharRange answer_chars) const override;
  std::string version() const override { return channel_->describe(); }
  std::size_t max_concurrency() const override { return max_concurrency_; }

 private:
  std::shared_ptr<JsonChannel> channel_;
  std::size_t max_concurrency_;
};

class RemoteQuestionAnswerer : public QuestionAnswerer {
 public:
  RemoteQuestionAnswerer(std::shared_ptr<JsonChannel> channel, double no_answer_threshold = 0.0,
                         std::size_t max_concurrency = 1);
  QAPrediction answer(std::string_view question, std::string_view context) const override;
  std::string version() const override { return channel_->describe(); }
  std::size_t max_concurrency() const override { return max_concurrency_; }

 private:
  std::shared_ptr<JsonChannel> channel_;
  double threshold_;
  std::size_t max_concurrency_;
};

// Answerability decision for span-QA models with a null answer.
bool is_answerable(double best_span_score, double null_score, double threshold = 0.0);

// Serves one wire-format request with local adapters; used by the stub
// adapter server. Unknown ops produce {"error": ...}.
nlohmann::json handle_adapter_request(const nlohmann::json& request, const QuestionGenerator& qg,
                                      const QuestionAnswerer& qa,
                                      const SyntacticProvider& provider);

}  // namespace spansteer

#endif  // SPANSTEER_QA_H_
